#pragma once

#include <span>
#include <vector>

#include "common.hpp"
#include "geometry.hpp"
#include "wideband.hpp"

namespace simbf {

// Feed -> layer-0 links. Entry (n, m) = (1/sqrt(N)) exp(-j 2 pi / lambda * |p_n - q_m|);
// pure phase, every entry has modulus 1/sqrt(N).
CMatrix feed_to_layer0(const SimGeometry& geometry, double wavelength);

// Power gain of a rectangular radiator: the fraction of isotropically
// radiated power crossing the element's rectangle as seen from `target`,
// i.e. the subtended solid angle over 4 pi,
//   beta = integral over the source rectangle of dz / (4 pi |target - t|^3) dA.
// Composite midpoint rule on a subgrid x subgrid mesh.
double element_power_gain(const Vec3& source_center, double size_x, double size_y,
                          const Vec3& target, int subgrid);

// Layer (l-1) -> layer l links, 1 <= l <= L. Entry (n2, n1) =
// sqrt(beta(n2, n1)) exp(-j 2 pi / lambda * |p_n2^(l) - p_n1^(l-1)|).
// Requires d_l > 0; at zero spacing the radiative gain integral degenerates.
CMatrix layer_to_layer(const SimGeometry& geometry, int layer, double wavelength, int subgrid);

// Reusable amplitude/phase split of layer_to_layer: sqrt(beta) and the
// inter-element distances are frequency independent.
struct LayerLinkGeometry {
  RMatrix amplitude;  // sqrt(beta)
  RMatrix distance;   // |p_n2^(l) - p_n1^(l-1)|
};
LayerLinkGeometry layer_link_geometry(const SimGeometry& geometry, int layer, int subgrid);
CMatrix layer_link_at(const LayerLinkGeometry& link, double wavelength);

// Diagonal vanishing-spacing limit of the layer link: unit gain onto the
// facing element only, phase from the residual axial distance.
CVector diagonal_layer_link(const SimGeometry& geometry, int layer, double wavelength);

// Spherical-wavefront UE link from the outermost layer. Entry n =
// sqrt(zeta_n) exp(-j 2 pi / lambda |r - p_n|) with the flat-element
// approximation zeta_n = delta |r_z| / (4 pi |r - p_n|^3).
CVector ue_channel(const SimGeometry& geometry, const Vec3& ue_position, double wavelength);

// Plane-wave baseline: common amplitude sqrt(zeta_bar) from the reference
// range loss c0 * range^-2, phases exp(-j 2 pi / lambda <k_hat, p_n>).
CVector far_field_ue_channel(const SimGeometry& geometry, const Vec3& direction,
                             double reference_range, double wavelength, double c0_linear);

// Z-parameter mutual coupling of the RF chain ports:
//   S = (Z_A + Z_L) (Z + Z_L I)^-1
// with the side-by-side dipole mutual impedance built from cosine/sine
// integrals. Identity when coupling is neglected.
CMatrix mutual_coupling(const std::vector<Vec3>& ports, double dipole_length, double wavelength,
                        double antenna_impedance, double load_impedance);

struct ChannelBuildOptions {
  int beta_subgrid = 8;          // midpoint resolution; 32 in accuracy mode
  bool coupling_enabled = false;
  double dipole_length = 0.0;    // meters, used only with coupling enabled
  double antenna_impedance = 50.0;
  double load_impedance = 50.0;
  bool far_field = false;        // plane-wave UE links instead of spherical
  double far_field_c0_db = -30.0;
};

// Every propagation matrix of one scenario point, per subcarrier, plus the
// center-frequency copies the holographic optimizer works on.
struct ChannelSet {
  int num_elements = 0;
  int num_feeds = 0;
  int num_layers = 0;  // L
  int subcarriers = 0;

  std::vector<CMatrix> feed_links;                // F0[k], N x M
  std::vector<std::vector<CMatrix>> layer_links;  // [k][l-1], N x N, l = 1..L
  std::vector<std::vector<CVector>> ue_links;     // [u][k], length N
  std::vector<CMatrix> coupling;                  // S[k], M x M

  CMatrix feed_links_center;
  std::vector<CMatrix> layer_links_center;
  std::vector<CVector> ue_links_center;

  const CMatrix& layer_link(int l, int k) const { return layer_links[k][l - 1]; }
  std::span<const CMatrix> layer_links_at(int k) const { return layer_links[k]; }
};

ChannelSet build_channel_set(const SimGeometry& geometry, const WidebandConfig& wideband,
                             const std::vector<Vec3>& ue_positions,
                             const ChannelBuildOptions& options, int threads = 1);

// Same shape as build_channel_set but with the diagonal vanishing-spacing
// layer links (stored as dense matrices), for cascade-limit cross-checks.
ChannelSet build_diagonal_channel_set(const SimGeometry& geometry, const WidebandConfig& wideband,
                                      const std::vector<Vec3>& ue_positions,
                                      const ChannelBuildOptions& options);

}  // namespace simbf
