#pragma once

#include <span>
#include <vector>

#include "cascade.hpp"
#include "common.hpp"

namespace simbf {

enum class PowerCoupling { PerSubcarrier, Shared };

struct PowerSettings {
  PowerCoupling coupling = PowerCoupling::PerSubcarrier;
  double tolerance = 1e-8;  // infinity-norm stop on the share vector
  int max_iterations = 100;
};

struct PowerShares {
  RMatrix shares;  // U x K, each column sums to 1
  std::vector<int> iterations_used;  // per subcarrier (single entry when shared)
  bool converged = true;
  std::vector<RVector> trajectory;  // share iterates of the last solved column
};

// Post-MMSE effective gain of user u with interference treated as noise:
//   rho^(k) h_bar^H S (Q + sigma^2 I)^-1 S^H h_bar, real and nonnegative.
double effective_gain(const CVector& mean, const CMatrix& coupling, const CMatrix& interference,
                      double noise_power, double total_power);

// Closed-form waterfilling over the simplex {p >= 0, sum p = 1} with the
// water level computed on the active set; users whose clipped share is
// nonpositive are removed until the remaining shares are feasible.
std::vector<double> waterfill_step(std::span<const double> gains);

// Alternating power allocation: interference matrices are rebuilt from the
// previous share iterate, then one waterfilling step is applied, until the
// shares stop moving. Uniform initial shares.
PowerShares iterative_waterfilling(const BasebandChannelStats& stats,
                                   std::span<const CMatrix> coupling,
                                   std::span<const double> total_power, double noise_power,
                                   const PowerSettings& settings);

}  // namespace simbf
