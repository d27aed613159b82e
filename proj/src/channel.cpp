#include "channel.hpp"

#include <cmath>
#include <string>

#include "parallel.hpp"
#include "special_functions.hpp"

namespace simbf {

CMatrix feed_to_layer0(const SimGeometry& geometry, double wavelength) {
  if (!(wavelength > 0.0)) throw std::invalid_argument("feed_to_layer0: wavelength must be positive");
  const int n = geometry.num_elements();
  const int m = geometry.num_feeds();
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  const double wavenumber = 2.0 * kPi / wavelength;
  CMatrix f0(n, m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) {
      const double dist = (geometry.elements[0][i] - geometry.feeds[j]).norm();
      f0(i, j) = scale * unit_phasor(-wavenumber * dist);
    }
  }
  return f0;
}

double element_power_gain(const Vec3& source_center, double size_x, double size_y,
                          const Vec3& target, int subgrid) {
  const double dz = std::abs(target.z() - source_center.z());
  if (!(dz > 0.0)) {
    throw NumericError("element_power_gain: target lies in the source plane");
  }
  if (subgrid < 1) throw std::invalid_argument("element_power_gain: subgrid must be >= 1");
  const double hx = size_x / subgrid;
  const double hy = size_y / subgrid;
  const double x0 = source_center.x() - 0.5 * size_x + 0.5 * hx;
  const double y0 = source_center.y() - 0.5 * size_y + 0.5 * hy;
  double sum = 0.0;
  for (int iy = 0; iy < subgrid; ++iy) {
    const double dy = target.y() - (y0 + iy * hy);
    for (int ix = 0; ix < subgrid; ++ix) {
      const double dx = target.x() - (x0 + ix * hx);
      const double r2 = dx * dx + dy * dy + dz * dz;
      sum += 1.0 / (r2 * std::sqrt(r2));
    }
  }
  return dz * hx * hy * sum / (4.0 * kPi);
}

LayerLinkGeometry layer_link_geometry(const SimGeometry& geometry, int layer, int subgrid) {
  if (layer < 1 || layer > geometry.num_layers()) {
    throw std::invalid_argument("layer_link_geometry: layer index out of range");
  }
  const auto& sources = geometry.elements[layer - 1];
  const auto& targets = geometry.elements[layer];
  const int n = geometry.num_elements();
  LayerLinkGeometry link;
  link.amplitude.resize(n, n);
  link.distance.resize(n, n);
  const double sx = geometry.config.element_size_x;
  const double sy = geometry.config.element_size_y;
  for (int n1 = 0; n1 < n; ++n1) {
    for (int n2 = 0; n2 < n; ++n2) {
      link.amplitude(n2, n1) =
          std::sqrt(element_power_gain(sources[n1], sx, sy, targets[n2], subgrid));
      link.distance(n2, n1) = (targets[n2] - sources[n1]).norm();
    }
  }
  return link;
}

CMatrix layer_link_at(const LayerLinkGeometry& link, double wavelength) {
  const double wavenumber = 2.0 * kPi / wavelength;
  const long rows = link.amplitude.rows();
  const long cols = link.amplitude.cols();
  CMatrix f(rows, cols);
  for (long c = 0; c < cols; ++c) {
    for (long r = 0; r < rows; ++r) {
      f(r, c) = link.amplitude(r, c) * unit_phasor(-wavenumber * link.distance(r, c));
    }
  }
  return f;
}

CMatrix layer_to_layer(const SimGeometry& geometry, int layer, double wavelength, int subgrid) {
  return layer_link_at(layer_link_geometry(geometry, layer, subgrid), wavelength);
}

CVector diagonal_layer_link(const SimGeometry& geometry, int layer, double wavelength) {
  if (layer < 1 || layer > geometry.num_layers()) {
    throw std::invalid_argument("diagonal_layer_link: layer index out of range");
  }
  const auto& sources = geometry.elements[layer - 1];
  const auto& targets = geometry.elements[layer];
  const int n = geometry.num_elements();
  const double wavenumber = 2.0 * kPi / wavelength;
  CVector diag(n);
  for (int i = 0; i < n; ++i) {
    diag[i] = unit_phasor(-wavenumber * (targets[i] - sources[i]).norm());
  }
  return diag;
}

CVector ue_channel(const SimGeometry& geometry, const Vec3& ue_position, double wavelength) {
  const auto& aperture = geometry.elements.back();
  const double plane_z = geometry.layer_z.back();
  if (std::abs(ue_position.z() - plane_z) <= 0.0) {
    throw std::invalid_argument("ue_channel: UE lies in the outermost layer plane");
  }
  const int n = geometry.num_elements();
  const double element_area = geometry.config.element_size_x * geometry.config.element_size_y;
  // |r| sin(psi_r) with psi_r measured from the aperture plane reduces to |r_z|.
  const double projected_range = std::abs(ue_position.z());
  const double wavenumber = 2.0 * kPi / wavelength;
  CVector g(n);
  for (int i = 0; i < n; ++i) {
    const double dist = (ue_position - aperture[i]).norm();
    const double zeta = element_area * projected_range / (4.0 * kPi * dist * dist * dist);
    g[i] = std::sqrt(zeta) * unit_phasor(-wavenumber * dist);
  }
  return g;
}

CVector far_field_ue_channel(const SimGeometry& geometry, const Vec3& direction,
                             double reference_range, double wavelength, double c0_linear) {
  if (std::abs(direction.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("far_field_ue_channel: direction must be a unit vector");
  }
  if (!(reference_range > 0.0)) {
    throw std::invalid_argument("far_field_ue_channel: reference range must be positive");
  }
  const auto& aperture = geometry.elements.back();
  const int n = geometry.num_elements();
  const double amplitude = std::sqrt(c0_linear / (reference_range * reference_range));
  const double wavenumber = 2.0 * kPi / wavelength;
  CVector g(n);
  for (int i = 0; i < n; ++i) {
    g[i] = amplitude * unit_phasor(-wavenumber * direction.dot(aperture[i]));
  }
  return g;
}

CMatrix mutual_coupling(const std::vector<Vec3>& ports, double dipole_length, double wavelength,
                        double antenna_impedance, double load_impedance) {
  const int m = static_cast<int>(ports.size());
  if (!(dipole_length > 0.0)) throw std::invalid_argument("mutual_coupling: dipole length must be positive");
  CMatrix z = CMatrix::Zero(m, m);
  const double k = 2.0 * kPi / wavelength;
  for (int a = 0; a < m; ++a) {
    z(a, a) = antenna_impedance;
    for (int b = a + 1; b < m; ++b) {
      const double d = (ports[a] - ports[b]).norm();
      if (!(d > 0.0)) throw std::invalid_argument("mutual_coupling: coincident ports");
      const double dd = std::sqrt(d * d + dipole_length * dipole_length);
      const double u0 = k * d;
      const double u1 = k * (dd + dipole_length);
      const double u2 = k * (dd - dipole_length);
      const double re = 60.0 * cosine_integral(u0) - 30.0 * cosine_integral(u1) -
                        30.0 * cosine_integral(u2);
      const double im = -60.0 * sine_integral(u0) + 30.0 * sine_integral(u1) +
                        30.0 * sine_integral(u2);
      z(a, b) = Complex(re, im);
      z(b, a) = Complex(re, im);
    }
  }
  CMatrix system = z + load_impedance * CMatrix::Identity(m, m);
  Eigen::FullPivLU<CMatrix> lu(system);
  if (!lu.isInvertible()) {
    throw NumericError("mutual_coupling: Z + Z_L I is singular");
  }
  return (antenna_impedance + load_impedance) * lu.inverse();
}

namespace {

CVector ue_link_for(const SimGeometry& geometry, const Vec3& position, double wavelength,
                    const ChannelBuildOptions& options) {
  if (options.far_field) {
    const double range = position.norm();
    if (!(range > 0.0)) throw std::invalid_argument("channel: far-field UE at the origin");
    return far_field_ue_channel(geometry, position / range, range, wavelength,
                                db_to_linear(options.far_field_c0_db));
  }
  return ue_channel(geometry, position, wavelength);
}

}  // namespace

ChannelSet build_channel_set(const SimGeometry& geometry, const WidebandConfig& wideband,
                             const std::vector<Vec3>& ue_positions,
                             const ChannelBuildOptions& options, int threads) {
  wideband.validate();
  if (!options.far_field) validate_ue_positions(geometry, ue_positions);

  ChannelSet set;
  set.num_elements = geometry.num_elements();
  set.num_feeds = geometry.num_feeds();
  set.num_layers = geometry.num_layers();
  set.subcarriers = wideband.subcarriers;
  const int k_count = wideband.subcarriers;
  const int users = static_cast<int>(ue_positions.size());
  const double lambda_c = wideband.center_wavelength();

  set.feed_links.resize(k_count);
  parallel_for(k_count, threads,
               [&](int k) { set.feed_links[k] = feed_to_layer0(geometry, wideband.wavelength(k)); });
  set.feed_links_center = feed_to_layer0(geometry, lambda_c);

  set.layer_links.assign(k_count, std::vector<CMatrix>(set.num_layers));
  set.layer_links_center.resize(set.num_layers);
  for (int l = 1; l <= set.num_layers; ++l) {
    const LayerLinkGeometry link = layer_link_geometry(geometry, l, options.beta_subgrid);
    parallel_for(k_count, threads, [&](int k) {
      set.layer_links[k][l - 1] = layer_link_at(link, wideband.wavelength(k));
    });
    set.layer_links_center[l - 1] = layer_link_at(link, lambda_c);
  }

  set.ue_links.resize(users);
  set.ue_links_center.resize(users);
  for (int u = 0; u < users; ++u) {
    set.ue_links[u].resize(k_count);
    parallel_for(k_count, threads, [&](int k) {
      set.ue_links[u][k] = ue_link_for(geometry, ue_positions[u], wideband.wavelength(k), options);
    });
    set.ue_links_center[u] = ue_link_for(geometry, ue_positions[u], lambda_c, options);
  }

  set.coupling.resize(k_count);
  for (int k = 0; k < k_count; ++k) {
    if (options.coupling_enabled) {
      set.coupling[k] = mutual_coupling(geometry.feeds, options.dipole_length,
                                        wideband.wavelength(k), options.antenna_impedance,
                                        options.load_impedance);
    } else {
      set.coupling[k] = CMatrix::Identity(set.num_feeds, set.num_feeds);
    }
  }
  return set;
}

ChannelSet build_diagonal_channel_set(const SimGeometry& geometry, const WidebandConfig& wideband,
                                      const std::vector<Vec3>& ue_positions,
                                      const ChannelBuildOptions& options) {
  ChannelSet set = build_channel_set(geometry, wideband, ue_positions, options, 1);
  for (int l = 1; l <= set.num_layers; ++l) {
    for (int k = 0; k < set.subcarriers; ++k) {
      set.layer_links[k][l - 1] =
          CMatrix(diagonal_layer_link(geometry, l, wideband.wavelength(k)).asDiagonal());
    }
    set.layer_links_center[l - 1] =
        CMatrix(diagonal_layer_link(geometry, l, wideband.center_wavelength()).asDiagonal());
  }
  return set;
}

}  // namespace simbf
