// Command-line front end; talks to the simulator exclusively through the
// C API in simbf.h.
#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "simbf.h"

namespace {

int exit_code_for(simbf_status status) {
  switch (status) {
    case SIMBF_OK: return 0;
    case SIMBF_ERR_INVALID_ARGUMENT: return 1;
    case SIMBF_ERR_PARSE: return 2;
    case SIMBF_ERR_NUMERIC: return 3;
    case SIMBF_ERR_IO: return 4;
    case SIMBF_ERR_INTERNAL: return 5;
  }
  return 5;
}

int report_failure(simbf_status status) {
  std::fprintf(stderr, "error (%s): %s\n", simbf_status_name(status), simbf_last_error());
  return exit_code_for(status);
}

struct ScenarioHandle {
  simbf_scenario* ptr = nullptr;
  ~ScenarioHandle() { simbf_scenario_free(ptr); }
};

struct RecordHandle {
  simbf_record* ptr = nullptr;
  ~RecordHandle() { simbf_record_free(ptr); }
};

struct CommonOptions {
  std::string scenario_path;
  std::string out_dir;
  int threads = -1;
  std::int64_t seed = -1;
};

simbf_status load_with_overrides(const CommonOptions& opts, ScenarioHandle* scenario) {
  simbf_status status = simbf_scenario_load(opts.scenario_path.c_str(), &scenario->ptr);
  if (status != SIMBF_OK) return status;
  if (opts.seed >= 0) {
    status = simbf_scenario_set_seed(scenario->ptr, static_cast<uint64_t>(opts.seed));
    if (status != SIMBF_OK) return status;
  }
  if (opts.threads >= 0) {
    status = simbf_scenario_set_threads(scenario->ptr, opts.threads);
    if (status != SIMBF_OK) return status;
  }
  if (!opts.out_dir.empty()) {
    status = simbf_scenario_set_output_dir(scenario->ptr, opts.out_dir.c_str());
    if (status != SIMBF_OK) return status;
  }
  return SIMBF_OK;
}

void add_common(CLI::App* cmd, CommonOptions* opts) {
  cmd->add_option("scenario", opts->scenario_path, "Scenario JSON file")->required();
  cmd->add_option("--out", opts->out_dir, "Output directory (overrides the scenario)");
  cmd->add_option("--threads", opts->threads, "Worker threads (0 = auto)");
  cmd->add_option("--seed", opts->seed, "Override the scenario seed");
}

int write_and_print(const RecordHandle& record, const std::string& out_dir) {
  const simbf_status status =
      simbf_record_write(record.ptr, out_dir.empty() ? nullptr : out_dir.c_str());
  if (status != SIMBF_OK) return report_failure(status);
  std::printf("%s", simbf_record_summary(record.ptr));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simbf — stacked-metasurface hybrid beamforming simulator"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  CLI::App* run_cmd = app.add_subcommand("run", "Run a scenario sweep and write CSV/JSON outputs");
  add_common(run_cmd, &run_opts);

  CommonOptions validate_opts;
  long samples = 10000;
  CLI::App* validate_cmd =
      app.add_subcommand("validate", "Monte Carlo check of the closed-form channel statistics");
  add_common(validate_cmd, &validate_opts);
  validate_cmd->add_option("--samples", samples, "Monte Carlo sample count")->required();

  CommonOptions limits_opts;
  CLI::App* limits_cmd =
      app.add_subcommand("limits", "Evaluate the high-power and vanishing-spacing rate limits");
  add_common(limits_cmd, &limits_opts);

  CLI11_PARSE(app, argc, argv);

  if (run_cmd->parsed()) {
    ScenarioHandle scenario;
    simbf_status status = load_with_overrides(run_opts, &scenario);
    if (status != SIMBF_OK) return report_failure(status);
    RecordHandle record;
    status = simbf_run(scenario.ptr, &record.ptr);
    if (status != SIMBF_OK) return report_failure(status);
    return write_and_print(record, run_opts.out_dir);
  }

  if (validate_cmd->parsed()) {
    ScenarioHandle scenario;
    simbf_status status = load_with_overrides(validate_opts, &scenario);
    if (status != SIMBF_OK) return report_failure(status);
    RecordHandle record;
    status = simbf_validate(scenario.ptr, samples, &record.ptr);
    if (status != SIMBF_OK) return report_failure(status);
    const int code = write_and_print(record, validate_opts.out_dir);
    if (code != 0) return code;
    int passed = 0;
    simbf_record_passed(record.ptr, &passed);
    if (!passed) {
      std::fprintf(stderr, "validation failed\n");
      return 6;
    }
    return 0;
  }

  ScenarioHandle scenario;
  simbf_status status = load_with_overrides(limits_opts, &scenario);
  if (status != SIMBF_OK) return report_failure(status);
  RecordHandle record;
  status = simbf_limits(scenario.ptr, &record.ptr);
  if (status != SIMBF_OK) return report_failure(status);
  return write_and_print(record, limits_opts.out_dir);
}
