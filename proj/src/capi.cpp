#include "simbf.h"

#include <cstring>
#include <functional>
#include <string>
#include <variant>

#include "outputs.hpp"
#include "pipeline.hpp"
#include "scenario.hpp"

namespace {

thread_local std::string g_last_error;

simbf_status record_failure(simbf_status status, const char* what) {
  g_last_error = what ? what : "unknown error";
  return status;
}

simbf_status guard(const std::function<void()>& body) {
  try {
    body();
    return SIMBF_OK;
  } catch (const simbf::ParseError& e) {
    return record_failure(SIMBF_ERR_PARSE, e.what());
  } catch (const simbf::NumericError& e) {
    return record_failure(SIMBF_ERR_NUMERIC, e.what());
  } catch (const simbf::IoError& e) {
    return record_failure(SIMBF_ERR_IO, e.what());
  } catch (const std::invalid_argument& e) {
    return record_failure(SIMBF_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return record_failure(SIMBF_ERR_INTERNAL, e.what());
  } catch (...) {
    return record_failure(SIMBF_ERR_INTERNAL, "unknown exception");
  }
}

}  // namespace

struct simbf_scenario {
  simbf::Scenario scenario;
};

struct simbf_record {
  std::variant<simbf::RunRecord, simbf::ValidationReport, simbf::LimitsReport> payload;
  std::string output_directory;
  std::string summary;
};

extern "C" {

const char* simbf_version(void) { return simbf::kLibraryVersion; }

const char* simbf_status_name(simbf_status status) {
  switch (status) {
    case SIMBF_OK: return "ok";
    case SIMBF_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case SIMBF_ERR_PARSE: return "parse-error";
    case SIMBF_ERR_NUMERIC: return "numeric-error";
    case SIMBF_ERR_IO: return "io-error";
    case SIMBF_ERR_INTERNAL: return "internal-error";
  }
  return "unknown";
}

const char* simbf_last_error(void) { return g_last_error.c_str(); }

simbf_status simbf_scenario_load(const char* path, simbf_scenario** out) {
  if (!path || !out) return record_failure(SIMBF_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guard([&] { *out = new simbf_scenario{simbf::load_scenario(path)}; });
}

simbf_status simbf_scenario_parse(const char* json_text, simbf_scenario** out) {
  if (!json_text || !out) return record_failure(SIMBF_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guard([&] { *out = new simbf_scenario{simbf::parse_scenario_text(json_text)}; });
}

void simbf_scenario_free(simbf_scenario* scenario) { delete scenario; }

simbf_status simbf_scenario_set_seed(simbf_scenario* scenario, uint64_t seed) {
  if (!scenario) return record_failure(SIMBF_ERR_INVALID_ARGUMENT, "null scenario");
  scenario->scenario.seed = seed;
  return SIMBF_OK;
}

simbf_status simbf_scenario_set_threads(simbf_scenario* scenario, int threads) {
  if (!scenario) return record_failure(SIMBF_ERR_INVALID_ARGUMENT, "null scenario");
  if (threads < 0) return record_failure(SIMBF_ERR_INVALID_ARGUMENT, "threads must be >= 0");
  scenario->scenario.threads = threads;
  return SIMBF_OK;
}

simbf_status simbf_scenario_set_output_dir(simbf_scenario* scenario, const char* dir) {
  if (!scenario || !dir) return record_failure(SIMBF_ERR_INVALID_ARGUMENT, "null argument");
  scenario->scenario.output.directory = dir;
  return SIMBF_OK;
}

simbf_status simbf_scenario_hash(const simbf_scenario* scenario, char* buffer, size_t length) {
  if (!scenario || !buffer) return record_failure(SIMBF_ERR_INVALID_ARGUMENT, "null argument");
  if (length < 17) return record_failure(SIMBF_ERR_INVALID_ARGUMENT, "buffer too small");
  return guard([&] {
    const std::string hash = simbf::scenario_hash(scenario->scenario);
    std::memcpy(buffer, hash.c_str(), hash.size() + 1);
  });
}

simbf_status simbf_run(const simbf_scenario* scenario, simbf_record** out) {
  if (!scenario || !out) return record_failure(SIMBF_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guard([&] {
    auto* record = new simbf_record;
    record->output_directory = scenario->scenario.output.directory;
    record->payload = simbf::run_scenario(scenario->scenario);
    record->summary = simbf::render_summary_json(std::get<simbf::RunRecord>(record->payload));
    *out = record;
  });
}

simbf_status simbf_validate(const simbf_scenario* scenario, long samples, simbf_record** out) {
  if (!scenario || !out) return record_failure(SIMBF_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guard([&] {
    auto* record = new simbf_record;
    record->output_directory = scenario->scenario.output.directory;
    record->payload = simbf::run_montecarlo_validation(scenario->scenario, samples);
    record->summary =
        simbf::render_validation_json(std::get<simbf::ValidationReport>(record->payload));
    *out = record;
  });
}

simbf_status simbf_limits(const simbf_scenario* scenario, simbf_record** out) {
  if (!scenario || !out) return record_failure(SIMBF_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guard([&] {
    auto* record = new simbf_record;
    record->output_directory = scenario->scenario.output.directory;
    record->payload = simbf::evaluate_limits(scenario->scenario);
    record->summary = simbf::render_limits_json(std::get<simbf::LimitsReport>(record->payload));
    *out = record;
  });
}

void simbf_record_free(simbf_record* record) { delete record; }

simbf_status simbf_record_write(const simbf_record* record, const char* directory) {
  if (!record) return record_failure(SIMBF_ERR_INVALID_ARGUMENT, "null record");
  const std::string dir = directory ? directory : record->output_directory;
  return guard([&] {
    if (const auto* run = std::get_if<simbf::RunRecord>(&record->payload)) {
      simbf::emit_outputs(*run, dir);
    } else if (const auto* validation = std::get_if<simbf::ValidationReport>(&record->payload)) {
      simbf::emit_validation(*validation, dir);
    } else if (const auto* limits = std::get_if<simbf::LimitsReport>(&record->payload)) {
      simbf::emit_limits(*limits, dir);
    }
  });
}

const char* simbf_record_summary(const simbf_record* record) {
  return record ? record->summary.c_str() : nullptr;
}

simbf_status simbf_record_passed(const simbf_record* record, int* passed) {
  if (!record || !passed) return record_failure(SIMBF_ERR_INVALID_ARGUMENT, "null argument");
  if (const auto* validation = std::get_if<simbf::ValidationReport>(&record->payload)) {
    *passed = validation->passed ? 1 : 0;
  } else {
    *passed = 0;
  }
  return SIMBF_OK;
}

}  // extern "C"
