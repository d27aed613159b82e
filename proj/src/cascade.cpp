#include "cascade.hpp"

#include <cmath>

#include "parallel.hpp"

namespace simbf {

SimPhaseConfig zero_phases(int num_layers_total, int n) {
  SimPhaseConfig phases;
  phases.theta.assign(num_layers_total, RVector::Zero(n));
  return phases;
}

CVector unit_modulus(const RVector& theta) {
  CVector v(theta.size());
  for (long i = 0; i < theta.size(); ++i) v[i] = unit_phasor(theta[i]);
  return v;
}

namespace {

void check_dimensions(const CMatrix& feed_link, std::span<const CMatrix> layers,
                      const SimPhaseConfig& phases) {
  const long n = feed_link.rows();
  if (static_cast<long>(phases.theta.size()) != static_cast<long>(layers.size()) + 1) {
    throw std::invalid_argument("cascade: phase config does not match layer count");
  }
  for (const auto& t : phases.theta) {
    if (t.size() != n) throw std::invalid_argument("cascade: phase vector length mismatch");
  }
  for (const auto& f : layers) {
    if (f.rows() != n || f.cols() != n) {
      throw std::invalid_argument("cascade: layer link dimension mismatch");
    }
  }
}

}  // namespace

CMatrix nominal_cascade(const CMatrix& feed_link, std::span<const CMatrix> layers,
                        const SimPhaseConfig& phases) {
  check_dimensions(feed_link, layers, phases);
  CMatrix cascade = unit_modulus(phases.theta[0]).asDiagonal() * feed_link;
  for (size_t l = 0; l < layers.size(); ++l) {
    cascade = layers[l] * cascade;
    cascade = unit_modulus(phases.theta[l + 1]).asDiagonal() * cascade;
  }
  return cascade;
}

CMatrix realized_cascade(const CMatrix& feed_link, std::span<const CMatrix> layers,
                         const SimPhaseConfig& phases, std::span<const CVector> errors) {
  check_dimensions(feed_link, layers, phases);
  if (errors.size() != phases.theta.size()) {
    throw std::invalid_argument("cascade: error factor count must be L+1");
  }
  auto layer_response = [&](size_t l) {
    return CVector(unit_modulus(phases.theta[l]).cwiseProduct(errors[l]));
  };
  CMatrix cascade = layer_response(0).asDiagonal() * feed_link;
  for (size_t l = 0; l < layers.size(); ++l) {
    cascade = layers[l] * cascade;
    cascade = layer_response(l + 1).asDiagonal() * cascade;
  }
  return cascade;
}

CVector mean_baseband_channel(const CMatrix& feed_link, std::span<const CMatrix> layers,
                              const CVector& ue_link, const SimPhaseConfig& phases, double xi) {
  check_dimensions(feed_link, layers, phases);
  const int total_layers = static_cast<int>(layers.size()) + 1;
  // h_bar = xi^(L+1) F0^H Th(0)^H F(1)^H Th(1)^H ... Th(L)^H g
  CVector t = unit_modulus(phases.theta.back()).conjugate().cwiseProduct(ue_link);
  for (int l = static_cast<int>(layers.size()) - 1; l >= 0; --l) {
    t = layers[l].adjoint() * t;
    t = unit_modulus(phases.theta[l]).conjugate().cwiseProduct(t);
  }
  return std::pow(xi, total_layers) * (feed_link.adjoint() * t);
}

CMatrix channel_uncertainty_covariance(const CMatrix& feed_link, std::span<const CMatrix> layers,
                                       const CVector& ue_link, const SimPhaseConfig& phases,
                                       double xi) {
  check_dimensions(feed_link, layers, phases);
  const long m = feed_link.cols();
  if (xi >= 1.0) return CMatrix::Zero(m, m);

  const double xi_sq = xi * xi;
  const int num_layers = static_cast<int>(layers.size());

  // Phi(L); the Hadamard-with-identity term is the plain diagonal.
  CVector scaled = unit_modulus(phases.theta[num_layers]).conjugate().cwiseProduct(ue_link);
  CMatrix phi = xi_sq * (scaled * scaled.adjoint());
  phi.diagonal() += (1.0 - xi_sq) * ue_link.cwiseAbs2().cast<Complex>();

  for (int l = num_layers - 1; l >= 0; --l) {
    const CMatrix inner = layers[l].adjoint() * phi * layers[l];
    const CVector response = unit_modulus(phases.theta[l]);
    phi = xi_sq * (response.conjugate().asDiagonal() * inner * response.asDiagonal());
    phi.diagonal() += (1.0 - xi_sq) * inner.diagonal();
  }

  const CMatrix second_moment = feed_link.adjoint() * phi * feed_link;
  const CVector mean = mean_baseband_channel(feed_link, layers, ue_link, phases, xi);
  CMatrix cov = second_moment - mean * mean.adjoint();
  cov = 0.5 * (cov + cov.adjoint());  // guard downstream factorizations
  return cov;
}

BasebandChannelStats compute_baseband_stats(const ChannelSet& channels,
                                            const SimPhaseConfig& phases, double xi, int threads) {
  const int users = static_cast<int>(channels.ue_links.size());
  const int k_count = channels.subcarriers;
  BasebandChannelStats stats;
  stats.mean.assign(users, std::vector<CVector>(k_count));
  stats.covariance.assign(users, std::vector<CMatrix>(k_count));
  parallel_for(users * k_count, threads, [&](int idx) {
    const int u = idx / k_count;
    const int k = idx % k_count;
    const auto links = channels.layer_links_at(k);
    stats.mean[u][k] =
        mean_baseband_channel(channels.feed_links[k], links, channels.ue_links[u][k], phases, xi);
    stats.covariance[u][k] = channel_uncertainty_covariance(channels.feed_links[k], links,
                                                            channels.ue_links[u][k], phases, xi);
  });
  return stats;
}

}  // namespace simbf
