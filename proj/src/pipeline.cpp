#include "pipeline.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "parallel.hpp"
#include "precoder.hpp"
#include "rng.hpp"

namespace simbf {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct SweepPoint {
  int index = 0;
  std::vector<std::pair<std::string, double>> assignments;
};

std::vector<SweepPoint> expand_sweep(const Scenario& scenario) {
  std::vector<SweepPoint> points;
  if (scenario.sweeps.empty()) {
    points.push_back({0, {}});
    return points;
  }
  // Cartesian product, last axis fastest.
  size_t total = 1;
  for (const auto& axis : scenario.sweeps) total *= axis.values.size();
  for (size_t i = 0; i < total; ++i) {
    SweepPoint point;
    point.index = static_cast<int>(i);
    size_t rest = i;
    for (size_t a = scenario.sweeps.size(); a-- > 0;) {
      const auto& axis = scenario.sweeps[a];
      const size_t pos = rest % axis.values.size();
      rest /= axis.values.size();
      point.assignments.emplace_back(axis.parameter, axis.values[pos]);
    }
    std::reverse(point.assignments.begin(), point.assignments.end());
    points.push_back(std::move(point));
  }
  return points;
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// Fully evaluated single-point state shared by the run/validate/limit paths.
struct PointContext {
  SimGeometry geometry;
  WidebandConfig wideband;
  ChannelSet channels;
  PhaseErrorModel error_model;
  SimPhaseConfig phases;
  OptimizerTrace trace;
  BasebandChannelStats stats;
  PowerShares shares;
  RMatrix user_power;  // rho_u^(k) = p_u^(k) * rho^(k), watts
};

PointContext build_point_context(const Scenario& scenario, uint64_t point_seed, int threads,
                                 std::vector<std::string>* warnings) {
  PointContext ctx;
  ctx.geometry = build_urpa_geometry(scenario.geometry);
  ctx.wideband = make_wideband(scenario);
  ctx.wideband.validate();
  ctx.error_model = phase_error_from_variance(scenario.error_family, scenario.sigma_p_sq);

  if (!scenario.far_field && warnings) {
    for (size_t u = 0; u < scenario.users.size(); ++u) {
      const FieldRegion region =
          field_region(ctx.geometry, ctx.wideband.center_wavelength(), scenario.users[u]);
      if (region == FieldRegion::ReactiveNearField) {
        warnings->push_back("user " + std::to_string(u) +
                            " is inside the reactive near-field boundary");
      }
    }
  }

  ctx.channels = build_channel_set(ctx.geometry, ctx.wideband, scenario.users,
                                   make_channel_options(scenario), threads);

  OptimizerSettings opt = scenario.optimizer;
  opt.seed = derive_seed(point_seed, 0x5EED);
  auto [phases, trace] =
      optimize_phases(ctx.channels.feed_links_center, ctx.channels.layer_links_center,
                      ctx.channels.ue_links_center, ctx.error_model.xi, opt);
  ctx.phases = std::move(phases);
  ctx.trace = std::move(trace);

  ctx.stats = compute_baseband_stats(ctx.channels, ctx.phases, ctx.error_model.xi, threads);

  ctx.shares = iterative_waterfilling(ctx.stats, ctx.channels.coupling, ctx.wideband.tx_power_w,
                                      ctx.wideband.noise_per_subcarrier_w, scenario.power);
  const int users = static_cast<int>(scenario.users.size());
  ctx.user_power.resize(users, ctx.wideband.subcarriers);
  for (int u = 0; u < users; ++u) {
    for (int k = 0; k < ctx.wideband.subcarriers; ++k) {
      ctx.user_power(u, k) = ctx.shares.shares(u, k) * ctx.wideband.tx_power_w[k];
    }
  }
  return ctx;
}

void evaluate_point(const Scenario& scenario, uint64_t point_seed, int threads,
                    PointResult* result) {
  if (scenario.tdma_baseline) {
    // Two single-user runs plus the time-sharing frontier.
    std::vector<double> solo_rates;
    for (size_t u = 0; u < scenario.users.size(); ++u) {
      Scenario solo = scenario;
      solo.tdma_baseline = false;
      solo.users = {scenario.users[u]};
      PointContext ctx = build_point_context(solo, derive_seed(point_seed, 100 + u), threads,
                                             &result->warnings);
      const RateReport report =
          evaluate_rates(ctx.stats, ctx.channels.coupling, ctx.user_power,
                         ctx.wideband.noise_per_subcarrier_w);
      solo_rates.push_back(report.average_rate);
      if (u == 0) {
        result->trace = ctx.trace;
        result->gamma_db = average_receive_snr_db(
            scenario.tx_power_total_w, scenario.noise_density_w_per_hz * scenario.bandwidth_hz,
            scenario.users[0].norm(), scenario.far_field_c0_db);
      }
    }
    const int grid = 101;
    result->tdma_epsilon.resize(grid);
    result->tdma_sum_rate.resize(grid);
    result->tdma_best = 0.0;
    for (int i = 0; i < grid; ++i) {
      const double eps = static_cast<double>(i) / (grid - 1);
      result->tdma_epsilon[i] = eps;
      result->tdma_sum_rate[i] = eps * solo_rates[0] + (1.0 - eps) * solo_rates[1];
      result->tdma_best = std::max(result->tdma_best, result->tdma_sum_rate[i]);
    }
    result->sum_rate_by_user =
        Eigen::Map<const RVector>(solo_rates.data(), static_cast<long>(solo_rates.size()));
    result->report.rate.resize(0, 0);
    result->report.sinr.resize(0, 0);
    result->report.average_rate = result->tdma_best;
    result->power_converged = true;
    return;
  }

  PointContext ctx = build_point_context(scenario, point_seed, threads, &result->warnings);
  result->report = evaluate_rates(ctx.stats, ctx.channels.coupling, ctx.user_power,
                                  ctx.wideband.noise_per_subcarrier_w);
  result->trace = ctx.trace;
  result->power_converged = ctx.shares.converged;
  if (!ctx.shares.converged) {
    result->warnings.push_back("power allocation hit the iteration cap");
  }
  result->gamma_db = average_receive_snr_db(
      scenario.tx_power_total_w, scenario.noise_density_w_per_hz * scenario.bandwidth_hz,
      scenario.users[0].norm(), scenario.far_field_c0_db);
  const int users = static_cast<int>(scenario.users.size());
  result->sum_rate_by_user.setZero(users);
  for (int u = 0; u < users; ++u) {
    result->sum_rate_by_user[u] = result->report.rate.row(u).sum() / ctx.wideband.subcarriers;
  }
}

std::string dump_channels(const Scenario& scenario, int threads);

}  // namespace

RunRecord run_scenario(const Scenario& scenario) {
  const auto start = Clock::now();
  RunRecord record;
  record.scenario_hash = scenario_hash(scenario);
  record.library_version = kLibraryVersion;
  record.scenario_echo = scenario_to_json(scenario);

  const std::vector<SweepPoint> grid = expand_sweep(scenario);
  record.points.resize(grid.size());
  const int threads = resolve_thread_count(scenario.threads);
  const int outer = std::min(threads, std::max(1, static_cast<int>(grid.size())));
  const int inner = std::max(1, threads / outer);

  parallel_for(static_cast<int>(grid.size()), outer, [&](int i) {
    const SweepPoint& point = grid[i];
    PointResult& result = record.points[i];
    result.index = point.index;
    std::string params, values;
    for (size_t a = 0; a < point.assignments.size(); ++a) {
      if (a) {
        params += ';';
        values += ';';
      }
      params += point.assignments[a].first;
      values += format_value(point.assignments[a].second);
    }
    result.parameters = params;
    result.values = values;
    try {
      Scenario at_point = scenario;
      at_point.sweeps.clear();
      for (const auto& [parameter, value] : point.assignments) {
        apply_sweep_assignment(at_point, parameter, value);
      }
      evaluate_point(at_point, derive_seed(scenario.seed, point.index), inner, &result);
    } catch (const std::exception& e) {
      result.failed = true;
      result.error = e.what();
      result.report.rate.resize(0, 0);
      result.report.sinr.resize(0, 0);
      result.report.average_rate = std::numeric_limits<double>::quiet_NaN();
    }
  });

  if (scenario.output.channel_dump) {
    record.channel_dump = dump_channels(scenario, threads);
  }
  record.wall_ms = elapsed_ms(start);
  return record;
}

namespace {

std::string dump_channels(const Scenario& scenario, int threads) {
  Scenario base = scenario;
  base.sweeps.clear();
  const SimGeometry geometry = build_urpa_geometry(base.geometry);
  const WidebandConfig wideband = make_wideband(base);
  const ChannelSet channels =
      build_channel_set(geometry, wideband, base.users, make_channel_options(base), threads);
  std::ostringstream out;
  out << "N,M,L,K,U\n"
      << channels.num_elements << ',' << channels.num_feeds << ',' << channels.num_layers << ','
      << channels.subcarriers << ',' << channels.ue_links.size() << '\n';
  auto write_matrix = [&](const std::string& tag, const CMatrix& m) {
    out << tag << '\n';
    for (long r = 0; r < m.rows(); ++r) {
      for (long c = 0; c < m.cols(); ++c) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", m(r, c).real(), m(r, c).imag());
        out << buf;
      }
    }
  };
  for (int k = 0; k < channels.subcarriers; ++k) {
    write_matrix("F0," + std::to_string(k), channels.feed_links[k]);
    for (int l = 1; l <= channels.num_layers; ++l) {
      write_matrix("F," + std::to_string(l) + ',' + std::to_string(k), channels.layer_link(l, k));
    }
    for (size_t u = 0; u < channels.ue_links.size(); ++u) {
      write_matrix("g," + std::to_string(u) + ',' + std::to_string(k), channels.ue_links[u][k]);
    }
    write_matrix("S," + std::to_string(k), channels.coupling[k]);
  }
  return out.str();
}

}  // namespace

ValidationReport run_montecarlo_validation(const Scenario& scenario, long samples) {
  if (samples < 1000) {
    throw std::invalid_argument("validation: at least 1000 samples are required");
  }
  const auto start = Clock::now();
  ValidationReport report;
  report.scenario_hash = scenario_hash(scenario);
  report.samples = samples;

  Scenario base = scenario;
  base.sweeps.clear();
  const int threads = resolve_thread_count(scenario.threads);
  std::vector<std::string> warnings;
  PointContext ctx = build_point_context(base, derive_seed(scenario.seed, 0), threads, &warnings);
  const int k_probe = ctx.wideband.subcarriers / 2;
  const int user = 0;
  const CVector& g = ctx.channels.ue_links[user][k_probe];
  const CMatrix& f0 = ctx.channels.feed_links[k_probe];
  const auto layers = ctx.channels.layer_links_at(k_probe);
  const int total_layers = ctx.channels.num_layers + 1;
  const int n = ctx.channels.num_elements;
  const int m = ctx.channels.num_feeds;

  const CVector mean_theory = ctx.stats.mean[user][k_probe];
  const CMatrix cov_theory = ctx.stats.covariance[user][k_probe];

  // Fixed stream decomposition keeps the reduction independent of the
  // thread count.
  const int streams = 64;
  std::vector<CVector> stream_sum(streams, CVector::Zero(m));
  std::vector<CMatrix> stream_outer(streams, CMatrix::Zero(m, m));
  std::vector<Complex> stream_phasor(streams, Complex(0.0, 0.0));
  std::vector<double> stream_phasor_sq(streams, 0.0);

  parallel_for(streams, threads, [&](int s) {
    const long lo = samples * s / streams;
    const long hi = samples * (s + 1) / streams;
    RandomStream rng(derive_seed(scenario.seed, 0xA11CE000ULL + s));
    CVector h(m);
    for (long it = lo; it < hi; ++it) {
      const auto errors =
          sample_error_matrices(ctx.error_model, total_layers, n, rng);
      // h^H = g^H Th(L) F(L) ... Th(0) F0 evaluated right-to-left.
      CVector t = unit_modulus(ctx.phases.theta[total_layers - 1])
                      .cwiseProduct(errors[total_layers - 1])
                      .conjugate()
                      .cwiseProduct(g);
      for (int l = total_layers - 2; l >= 0; --l) {
        t = layers[l].adjoint() * t;
        t = unit_modulus(ctx.phases.theta[l]).cwiseProduct(errors[l]).conjugate().cwiseProduct(t);
      }
      h = f0.adjoint() * t;
      stream_sum[s] += h;
      const CVector centered = h - mean_theory;
      stream_outer[s] += centered * centered.adjoint();
      const double draw = sample_phase_error(ctx.error_model, rng);
      stream_phasor[s] += unit_phasor(draw);
      stream_phasor_sq[s] += std::norm(unit_phasor(draw) - Complex(ctx.error_model.xi, 0.0));
    }
  });

  CVector mean_emp = CVector::Zero(m);
  CMatrix cov_emp = CMatrix::Zero(m, m);
  Complex phasor_sum(0.0, 0.0);
  double phasor_sq = 0.0;
  for (int s = 0; s < streams; ++s) {
    mean_emp += stream_sum[s];
    cov_emp += stream_outer[s];
    phasor_sum += stream_phasor[s];
    phasor_sq += stream_phasor_sq[s];
  }
  mean_emp /= static_cast<double>(samples);
  cov_emp /= static_cast<double>(samples);
  cov_emp -= (mean_emp - mean_theory) * (mean_emp - mean_theory).adjoint();

  report.covariance_theory = cov_theory;
  report.covariance_empirical = cov_emp;

  // xi check: empirical first circular moment within 3 standard errors.
  {
    const Complex emp = phasor_sum / static_cast<double>(samples);
    const double variance = phasor_sq / samples - std::norm(emp - Complex(ctx.error_model.xi, 0));
    const double se = std::sqrt(std::max(variance, 1e-300) / samples);
    ValidationCheck check;
    check.name = "xi_first_circular_moment";
    check.value = std::abs(emp - Complex(ctx.error_model.xi, 0.0));
    check.threshold = 3.0 * se;
    check.passed = check.value <= check.threshold;
    report.checks.push_back(check);
  }

  // Mean channel: fraction of entries within 3 standard errors must reach 95%.
  {
    int within = 0;
    for (int i = 0; i < m; ++i) {
      double var = 0.0;
      for (int s = 0; s < streams; ++s) var += stream_outer[s](i, i).real();
      var = var / samples;
      const double se = std::sqrt(std::max(var, 1e-300) / samples);
      if (std::abs(mean_emp[i] - mean_theory[i]) <= 3.0 * se) ++within;
    }
    ValidationCheck check;
    check.name = "mean_channel_entries_within_3se";
    check.value = 1.0 - static_cast<double>(within) / m;  // failing fraction
    check.threshold = 0.05;
    check.passed = check.value <= check.threshold;
    report.checks.push_back(check);
  }

  // Covariance: relative Frobenius error under 5%.
  {
    ValidationCheck check;
    check.name = "covariance_frobenius_relative";
    const double denom = std::max(cov_theory.norm(), 1e-300);
    check.value = (cov_emp - cov_theory).norm() / denom;
    check.threshold = 0.05;
    check.passed = check.value <= check.threshold;
    report.checks.push_back(check);
  }

  report.passed = true;
  for (const auto& check : report.checks) report.passed = report.passed && check.passed;
  report.wall_ms = elapsed_ms(start);
  return report;
}

LimitsReport evaluate_limits(const Scenario& scenario) {
  const auto start = Clock::now();
  LimitsReport report;
  report.scenario_hash = scenario_hash(scenario);

  Scenario base = scenario;
  base.sweeps.clear();
  const int threads = resolve_thread_count(scenario.threads);
  std::vector<std::string> warnings;
  PointContext ctx = build_point_context(base, derive_seed(scenario.seed, 0), threads, &warnings);

  report.average_rate = evaluate_rates(ctx.stats, ctx.channels.coupling, ctx.user_power,
                                       ctx.wideband.noise_per_subcarrier_w)
                            .average_rate;

  // Share ratios from the converged allocation at the center-most subcarrier;
  // zero shares are floored to keep the ratios finite.
  const int users = static_cast<int>(base.users.size());
  const int k_probe = ctx.wideband.subcarriers / 2;
  std::vector<double> shares(users);
  for (int u = 0; u < users; ++u) {
    shares[u] = std::max(ctx.shares.shares(u, k_probe), 1e-12);
  }
  report.high_snr = high_snr_limit(ctx.stats, ctx.channels.coupling, shares,
                                   &report.high_snr_infinite);
  report.zero_spacing =
      zero_distance_limit(ctx.geometry, ctx.wideband, ctx.channels, ctx.phases,
                          ctx.error_model.xi, ctx.user_power, ctx.wideband.noise_per_subcarrier_w);
  report.wall_ms = elapsed_ms(start);
  return report;
}

}  // namespace simbf
