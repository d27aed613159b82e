#include "outputs.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace simbf {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("outputs: cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("outputs: failed while writing '" + path + "'");
}

nlohmann::json matrix_json(const CMatrix& m) {
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (long r = 0; r < m.rows(); ++r) {
    nlohmann::json re_row = nlohmann::json::array();
    nlohmann::json im_row = nlohmann::json::array();
    for (long c = 0; c < m.cols(); ++c) {
      re_row.push_back(m(r, c).real());
      im_row.push_back(m(r, c).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  return {{"re", std::move(re)}, {"im", std::move(im)}};
}

}  // namespace

std::string render_summary_csv(const RunRecord& record) {
  std::ostringstream out;
  out << "point,parameters,values,gamma_db,r_avg\n";
  for (const auto& p : record.points) {
    out << p.index << ',' << p.parameters << ',' << p.values << ',' << num(p.gamma_db) << ','
        << num(p.report.average_rate) << '\n';
  }
  return out.str();
}

std::string render_rates_csv(const RunRecord& record) {
  std::ostringstream out;
  out << "point,user,subcarrier,sinr,rate\n";
  for (const auto& p : record.points) {
    for (long u = 0; u < p.report.rate.rows(); ++u) {
      for (long k = 0; k < p.report.rate.cols(); ++k) {
        out << p.index << ',' << u << ',' << k << ',' << num(p.report.sinr(u, k)) << ','
            << num(p.report.rate(u, k)) << '\n';
      }
    }
  }
  return out.str();
}

std::string render_trace_csv(const RunRecord& record) {
  std::ostringstream out;
  out << "point,sweep,objective\n";
  for (const auto& p : record.points) {
    if (p.failed) continue;
    out << p.index << ",0," << num(p.trace.initial_objective) << '\n';
    for (size_t s = 0; s < p.trace.objective_per_sweep.size(); ++s) {
      out << p.index << ',' << (s + 1) << ',' << num(p.trace.objective_per_sweep[s]) << '\n';
    }
  }
  return out.str();
}

std::string render_frontier_csv(const RunRecord& record) {
  std::ostringstream out;
  out << "point,epsilon,sum_rate\n";
  for (const auto& p : record.points) {
    for (size_t i = 0; i < p.tdma_epsilon.size(); ++i) {
      out << p.index << ',' << num(p.tdma_epsilon[i]) << ',' << num(p.tdma_sum_rate[i]) << '\n';
    }
  }
  return out.str();
}

std::string render_summary_json(const RunRecord& record) {
  nlohmann::json j;
  j["scenario_hash"] = record.scenario_hash;
  j["library_version"] = record.library_version;
  j["scenario"] = record.scenario_echo;
  j["wall_ms"] = record.wall_ms;
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : record.points) {
    nlohmann::json pj;
    pj["index"] = p.index;
    pj["parameters"] = p.parameters;
    pj["values"] = p.values;
    pj["failed"] = p.failed;
    if (p.failed) {
      pj["error"] = p.error;
    } else {
      pj["r_avg"] = p.report.average_rate;
      pj["gamma_db"] = p.gamma_db;
      pj["sweeps_used"] = p.trace.sweeps_used;
      pj["power_converged"] = p.power_converged;
      nlohmann::json rates = nlohmann::json::array();
      for (long u = 0; u < p.sum_rate_by_user.size(); ++u) rates.push_back(p.sum_rate_by_user[u]);
      pj["rate_by_user"] = std::move(rates);
      if (!p.tdma_epsilon.empty()) pj["tdma_best"] = p.tdma_best;
    }
    pj["warnings"] = p.warnings;
    points.push_back(std::move(pj));
  }
  j["points"] = std::move(points);
  return j.dump(2) + "\n";
}

std::string render_validation_json(const ValidationReport& report) {
  nlohmann::json j;
  j["scenario_hash"] = report.scenario_hash;
  j["samples"] = report.samples;
  j["passed"] = report.passed;
  j["wall_ms"] = report.wall_ms;
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"value", c.value},
                      {"threshold", c.threshold},
                      {"passed", c.passed}});
  }
  j["checks"] = std::move(checks);
  j["covariance_theory"] = matrix_json(report.covariance_theory);
  j["covariance_empirical"] = matrix_json(report.covariance_empirical);
  return j.dump(2) + "\n";
}

std::string render_limits_json(const LimitsReport& report) {
  nlohmann::json j;
  j["scenario_hash"] = report.scenario_hash;
  j["average_rate"] = report.average_rate;
  j["high_snr_infinite"] = report.high_snr_infinite;
  j["high_snr"] = report.high_snr_infinite ? nlohmann::json() : nlohmann::json(report.high_snr);
  j["zero_spacing"] = report.zero_spacing;
  j["wall_ms"] = report.wall_ms;
  return j.dump(2) + "\n";
}

void emit_outputs(const RunRecord& record, const std::string& directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw IoError("outputs: cannot create directory '" + directory + "': " + ec.message());
  write_file(directory + "/summary.csv", render_summary_csv(record));
  write_file(directory + "/rates.csv", render_rates_csv(record));
  write_file(directory + "/trace.csv", render_trace_csv(record));
  write_file(directory + "/summary.json", render_summary_json(record));
  bool any_frontier = false;
  for (const auto& p : record.points) any_frontier = any_frontier || !p.tdma_epsilon.empty();
  if (any_frontier) write_file(directory + "/frontier.csv", render_frontier_csv(record));
  if (!record.channel_dump.empty()) write_file(directory + "/channels.csv", record.channel_dump);
}

void emit_validation(const ValidationReport& report, const std::string& directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw IoError("outputs: cannot create directory '" + directory + "': " + ec.message());
  write_file(directory + "/validation.json", render_validation_json(report));
}

void emit_limits(const LimitsReport& report, const std::string& directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw IoError("outputs: cannot create directory '" + directory + "': " + ec.message());
  write_file(directory + "/limits.json", render_limits_json(report));
}

}  // namespace simbf
