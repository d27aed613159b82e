#include "power_allocation.hpp"

#include <cmath>

#include "precoder.hpp"

namespace simbf {

double effective_gain(const CVector& mean, const CMatrix& coupling, const CMatrix& interference,
                      double noise_power, double total_power) {
  if (!(noise_power > 0.0)) throw std::invalid_argument("effective_gain: noise power must be positive");
  const long m = coupling.rows();
  const CVector matched = coupling.adjoint() * mean;
  CMatrix system = interference + noise_power * CMatrix::Identity(m, m);
  Eigen::LDLT<CMatrix> ldlt(system);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw NumericError("effective_gain: interference-plus-noise system is not positive definite");
  }
  const Complex quad = matched.adjoint() * ldlt.solve(matched);
  return total_power * quad.real();
}

std::vector<double> waterfill_step(std::span<const double> gains) {
  const int users = static_cast<int>(gains.size());
  if (users == 0) throw std::invalid_argument("waterfill_step: empty gain list");
  std::vector<double> shares(users, 0.0);
  std::vector<int> active;
  for (int u = 0; u < users; ++u) {
    if (gains[u] > 0.0) active.push_back(u);
  }
  if (active.empty()) throw NumericError("waterfill_step: no user has positive gain");

  for (;;) {
    double inverse_sum = 0.0;
    for (int u : active) inverse_sum += 1.0 / gains[u];
    const double level = (1.0 + inverse_sum) / static_cast<double>(active.size());
    bool feasible = true;
    for (int u : active) {
      if (level - 1.0 / gains[u] <= 0.0) {
        feasible = false;
        break;
      }
    }
    if (feasible || active.size() == 1) {
      for (int u : active) shares[u] = std::max(level - 1.0 / gains[u], 0.0);
      break;
    }
    std::vector<int> kept;
    for (int u : active) {
      if (level - 1.0 / gains[u] > 0.0) kept.push_back(u);
    }
    if (kept.empty()) {
      // All shares clipped at once: keep the strongest user.
      int best = active.front();
      for (int u : active) {
        if (gains[u] > gains[best]) best = u;
      }
      kept.push_back(best);
    }
    active.swap(kept);
  }
  return shares;
}

namespace {

struct ColumnProblem {
  std::span<const CVector> means;
  std::span<const CMatrix> covariances;
  const CMatrix* coupling;
  double total_power;
  double noise_power;
};

std::vector<double> gains_at(const ColumnProblem& problem, const std::vector<double>& shares) {
  const int users = static_cast<int>(problem.means.size());
  std::vector<double> powers(users);
  for (int u = 0; u < users; ++u) powers[u] = shares[u] * problem.total_power;
  std::vector<double> gains(users);
  for (int u = 0; u < users; ++u) {
    const CMatrix q = interference_matrix(problem.means, problem.covariances, *problem.coupling,
                                          powers, u);
    gains[u] = effective_gain(problem.means[u], *problem.coupling, q, problem.noise_power,
                              problem.total_power);
  }
  return gains;
}

}  // namespace

PowerShares iterative_waterfilling(const BasebandChannelStats& stats,
                                   std::span<const CMatrix> coupling,
                                   std::span<const double> total_power, double noise_power,
                                   const PowerSettings& settings) {
  const int users = static_cast<int>(stats.mean.size());
  const int k_count = users > 0 ? static_cast<int>(stats.mean.front().size()) : 0;
  if (users == 0 || k_count == 0) throw std::invalid_argument("iterative_waterfilling: empty stats");
  if (static_cast<int>(coupling.size()) != k_count ||
      static_cast<int>(total_power.size()) != k_count) {
    throw std::invalid_argument("iterative_waterfilling: per-subcarrier input length mismatch");
  }

  PowerShares result;
  result.shares.resize(users, k_count);
  result.converged = true;

  std::vector<std::vector<CVector>> means_by_k(k_count, std::vector<CVector>(users));
  std::vector<std::vector<CMatrix>> cov_by_k(k_count, std::vector<CMatrix>(users));
  for (int u = 0; u < users; ++u) {
    for (int k = 0; k < k_count; ++k) {
      means_by_k[k][u] = stats.mean[u][k];
      cov_by_k[k][u] = stats.covariance[u][k];
    }
  }

  auto iterate = [&](const std::function<std::vector<double>(const std::vector<double>&)>& gains_of,
                     int* iterations) {
    std::vector<double> shares(users, 1.0 / users);
    result.trajectory.clear();
    result.trajectory.push_back(Eigen::Map<const RVector>(shares.data(), users));
    int t = 0;
    for (; t < settings.max_iterations; ++t) {
      const std::vector<double> next = waterfill_step(gains_of(shares));
      result.trajectory.push_back(Eigen::Map<const RVector>(next.data(), users));
      double delta = 0.0;
      for (int u = 0; u < users; ++u) delta = std::max(delta, std::abs(next[u] - shares[u]));
      shares = next;
      if (delta < settings.tolerance) break;
    }
    if (t == settings.max_iterations) result.converged = false;
    *iterations = std::min(t + 1, settings.max_iterations);
    return shares;
  };

  if (settings.coupling == PowerCoupling::Shared) {
    int iterations = 0;
    auto gains_of = [&](const std::vector<double>& shares) {
      std::vector<double> avg(users, 0.0);
      for (int k = 0; k < k_count; ++k) {
        ColumnProblem problem{means_by_k[k], cov_by_k[k], &coupling[k], total_power[k],
                              noise_power};
        const std::vector<double> g = gains_at(problem, shares);
        for (int u = 0; u < users; ++u) avg[u] += g[u] / k_count;
      }
      return avg;
    };
    const std::vector<double> shares = iterate(gains_of, &iterations);
    for (int k = 0; k < k_count; ++k) {
      for (int u = 0; u < users; ++u) result.shares(u, k) = shares[u];
    }
    result.iterations_used.assign(1, iterations);
    return result;
  }

  result.iterations_used.resize(k_count);
  for (int k = 0; k < k_count; ++k) {
    ColumnProblem problem{means_by_k[k], cov_by_k[k], &coupling[k], total_power[k], noise_power};
    auto gains_of = [&](const std::vector<double>& shares) { return gains_at(problem, shares); };
    const std::vector<double> shares = iterate(gains_of, &result.iterations_used[k]);
    for (int u = 0; u < users; ++u) result.shares(u, k) = shares[u];
  }
  return result;
}

}  // namespace simbf
