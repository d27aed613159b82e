#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rate.hpp"
#include "scenario.hpp"

namespace simbf {

// One sweep point, fully evaluated. `parameters`/`values` are the sweep
// assignments joined with ';' (empty for an unswept run).
struct PointResult {
  int index = 0;
  std::string parameters;
  std::string values;
  bool failed = false;
  std::string error;
  std::vector<std::string> warnings;

  RateReport report;
  OptimizerTrace trace;
  double gamma_db = 0.0;  // reference-user average receive SNR
  RVector sum_rate_by_user;
  bool power_converged = true;

  // TDMA baseline quantities (two-user far-field comparison only).
  std::vector<double> tdma_epsilon;
  std::vector<double> tdma_sum_rate;
  double tdma_best = 0.0;
};

struct RunRecord {
  std::string scenario_hash;
  std::string library_version;
  nlohmann::json scenario_echo;
  std::vector<PointResult> points;
  double wall_ms = 0.0;
  std::string channel_dump;  // populated when the scenario asks for it
};

// Executes the sweep grid. Point failures are captured per point; the rest
// of the sweep still runs.
RunRecord run_scenario(const Scenario& scenario);

// Monte Carlo cross-check of the closed-form channel statistics on the base
// scenario (first user, center-most subcarrier).
struct ValidationCheck {
  std::string name;
  double value = 0.0;      // measured discrepancy
  double threshold = 0.0;  // pass when value <= threshold
  bool passed = false;
};

struct ValidationReport {
  std::string scenario_hash;
  long samples = 0;
  std::vector<ValidationCheck> checks;
  bool passed = false;
  double wall_ms = 0.0;
  // Dumped for regression: closed-form and empirical covariance at the
  // validated (user, subcarrier).
  CMatrix covariance_theory;
  CMatrix covariance_empirical;
};

ValidationReport run_montecarlo_validation(const Scenario& scenario, long samples);

// High-power and vanishing-spacing sum-rate limits of the base scenario.
struct LimitsReport {
  std::string scenario_hash;
  double average_rate = 0.0;        // at the configured power
  double high_snr = 0.0;            // +inf when distortion-free single user
  bool high_snr_infinite = false;
  double zero_spacing = 0.0;
  double wall_ms = 0.0;
};

LimitsReport evaluate_limits(const Scenario& scenario);

}  // namespace simbf
