#pragma once

#include <span>
#include <vector>

#include "channel.hpp"
#include "common.hpp"

namespace simbf {

// Commanded phase shifts per layer, radians in (-pi, pi]. Layer l's response
// is the unitary diagonal Diag{exp(j theta_n^(l))}.
struct SimPhaseConfig {
  std::vector<RVector> theta;  // size L+1, each length N

  int num_layers() const { return static_cast<int>(theta.size()) - 1; }
};

SimPhaseConfig zero_phases(int num_layers_total, int n);

// exp(j theta) elementwise.
CVector unit_modulus(const RVector& theta);

// Nominal cascade A_bar = Th(L) F(L) ... Th(1) F(1) Th(0) F0 for one
// subcarrier. `layers` holds F(1)..F(L).
CMatrix nominal_cascade(const CMatrix& feed_link, std::span<const CMatrix> layers,
                        const SimPhaseConfig& phases);

// Realized cascade with sampled per-layer error factors (diagonal entries
// exp(j theta~)).
CMatrix realized_cascade(const CMatrix& feed_link, std::span<const CMatrix> layers,
                         const SimPhaseConfig& phases, std::span<const CVector> errors);

// Mean baseband channel h_bar = xi^(L+1) (g^H A_bar)^H, evaluated
// right-to-left in O(L N^2) without forming A_bar.
CVector mean_baseband_channel(const CMatrix& feed_link, std::span<const CMatrix> layers,
                              const CVector& ue_link, const SimPhaseConfig& phases, double xi);

// Covariance of the baseband channel uncertainty h~. Backward second-moment
// recursion through the stack:
//   Phi(L)   = xi^2 Th(L)^H g g^H Th(L) + (1 - xi^2) Diag(|g|^2)
//   Phi(l)   = xi^2 Th(l)^H F(l+1)^H Phi(l+1) F(l+1) Th(l)
//              + (1 - xi^2) Diag(diag(F(l+1)^H Phi(l+1) F(l+1)))
//   C        = F0^H Phi(0) F0 - xi^(2(L+1)) A_bar^H g g^H A_bar,
// hermitized after assembly. Zero when xi == 1.
CMatrix channel_uncertainty_covariance(const CMatrix& feed_link, std::span<const CMatrix> layers,
                                       const CVector& ue_link, const SimPhaseConfig& phases,
                                       double xi);

// Mean/covariance pairs for every user and subcarrier of a channel set.
struct BasebandChannelStats {
  std::vector<std::vector<CVector>> mean;        // [u][k], length M
  std::vector<std::vector<CMatrix>> covariance;  // [u][k], M x M
};

BasebandChannelStats compute_baseband_stats(const ChannelSet& channels,
                                            const SimPhaseConfig& phases, double xi,
                                            int threads = 1);

}  // namespace simbf
