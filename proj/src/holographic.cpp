#include "holographic.hpp"

#include <cmath>

#include "rng.hpp"

namespace simbf {

EquivalentSplit equivalent_split(const CMatrix& feed_link, std::span<const CMatrix> layers,
                                 const CVector& ue_link, const SimPhaseConfig& phases, double xi,
                                 int layer) {
  const int num_intermediate = static_cast<int>(layers.size());
  if (layer < 0 || layer > num_intermediate) {
    throw std::invalid_argument("equivalent_split: layer index out of range");
  }
  const CVector mean = mean_baseband_channel(feed_link, layers, ue_link, phases, xi);

  EquivalentSplit split;
  // Upstream: RF chains through layers below `layer`, combined with the
  // current mean channel; carries xi^layer.
  CVector up = feed_link * mean;
  for (int l = 1; l <= layer; ++l) {
    up = unit_modulus(phases.theta[l - 1]).cwiseProduct(up);
    up = layers[l - 1] * up;
  }
  split.upstream = std::pow(xi, layer) * up;

  // Downstream: UE back through layers above `layer`; carries xi^(L-layer).
  CVector down = ue_link;
  for (int l = num_intermediate; l >= layer + 1; --l) {
    down = unit_modulus(phases.theta[l]).conjugate().cwiseProduct(down);
    down = layers[l - 1].adjoint() * down;
  }
  split.downstream = std::pow(xi, num_intermediate - layer) * down;
  return split;
}

namespace {

// Z row u carries conj(downstream_n) * upstream_n; as a column, z_u has
// entries downstream_n * conj(upstream_n).
CMatrix coupling_rows(const std::vector<EquivalentSplit>& splits) {
  const int users = static_cast<int>(splits.size());
  if (users == 0) throw std::invalid_argument("layer_update: needs at least one user");
  const long n = splits.front().downstream.size();
  CMatrix z(users, n);
  for (int u = 0; u < users; ++u) {
    if (splits[u].downstream.size() != n || splits[u].upstream.size() != n) {
      throw std::invalid_argument("layer_update: split dimension mismatch");
    }
    z.row(u) = splits[u].downstream.conjugate().cwiseProduct(splits[u].upstream).transpose();
  }
  return z;
}

RVector phases_of(const CVector& v) {
  RVector out(v.size());
  for (long i = 0; i < v.size(); ++i) out[i] = std::arg(v[i]);
  return out;
}

}  // namespace

RVector layer_update(const std::vector<EquivalentSplit>& splits) {
  const CMatrix z = coupling_rows(splits);
  const int users = static_cast<int>(z.rows());
  const long n = z.cols();
  if (!(z.norm() > 0.0)) throw NumericError("layer_update: all coupling rows are zero");

  if (users <= 8) {
    // Rank <= U: solve the U x U Gram problem and lift, exact and O(N U^2).
    const CMatrix gram = z * z.adjoint();
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram);
    if (eig.info() != Eigen::Success) throw NumericError("layer_update: eigensolver failed");
    const CVector principal = z.adjoint() * eig.eigenvectors().col(users - 1);
    return phases_of(principal);
  }

  // Power iteration on Z^H Z with a deterministic start.
  CVector x = CVector::Ones(n) / std::sqrt(static_cast<double>(n));
  double lambda = 0.0;
  for (int it = 0; it < 5000; ++it) {
    CVector y = z.adjoint() * (z * x);
    const double norm = y.norm();
    if (!(norm > 0.0)) break;
    y /= norm;
    const double residual = (y - x * (x.adjoint() * y)(0)).norm();
    x = y;
    lambda = norm;
    if (residual < 1e-10) return phases_of(x);
  }
  if (lambda > 0.0) {
    // Stalled iteration (near-degenerate leading eigenvalues); fall back to
    // the dense solver.
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(z.adjoint() * z);
    if (eig.info() != Eigen::Success) throw NumericError("layer_update: eigensolver failed");
    return phases_of(eig.eigenvectors().col(n - 1));
  }
  throw NumericError("layer_update: power iteration collapsed");
}

double sum_channel_gain(const CMatrix& feed_link, std::span<const CMatrix> layers,
                        std::span<const CVector> ue_links, const SimPhaseConfig& phases,
                        double xi) {
  double objective = 0.0;
  for (const auto& g : ue_links) {
    objective += mean_baseband_channel(feed_link, layers, g, phases, xi).squaredNorm();
  }
  return objective;
}

std::pair<SimPhaseConfig, OptimizerTrace> optimize_phases(const CMatrix& feed_link,
                                                          std::span<const CMatrix> layers,
                                                          std::span<const CVector> ue_links,
                                                          double xi,
                                                          const OptimizerSettings& settings) {
  settings.validate();
  if (ue_links.empty()) throw std::invalid_argument("optimize_phases: needs at least one user");
  const int users = static_cast<int>(ue_links.size());
  const int total_layers = static_cast<int>(layers.size()) + 1;
  const long n = feed_link.rows();

  RandomStream rng(settings.seed);
  SimPhaseConfig phases;
  phases.theta.resize(total_layers);
  for (auto& theta : phases.theta) {
    theta.resize(n);
    for (long i = 0; i < n; ++i) theta[i] = rng.uniform(-kPi, kPi);
  }

  OptimizerTrace trace;
  trace.initial_objective = sum_channel_gain(feed_link, layers, ue_links, phases, xi);
  double previous = trace.initial_objective;

  for (int sweep = 0; sweep < settings.max_sweeps; ++sweep) {
    for (int layer = 0; layer < total_layers; ++layer) {
      std::vector<EquivalentSplit> splits(users);
      for (int u = 0; u < users; ++u) {
        splits[u] = equivalent_split(feed_link, layers, ue_links[u], phases, xi, layer);
      }
      phases.theta[layer] = layer_update(splits);
      trace.objective_per_update.push_back(
          sum_channel_gain(feed_link, layers, ue_links, phases, xi));
    }
    const double objective = trace.objective_per_update.back();
    trace.objective_per_sweep.push_back(objective);
    trace.sweeps_used = sweep + 1;
    if (std::abs(objective - previous) < settings.epsilon) break;
    previous = objective;
  }
  return {std::move(phases), std::move(trace)};
}

}  // namespace simbf
