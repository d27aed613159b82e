#pragma once

#include <string>

#include "pipeline.hpp"

namespace simbf {

// CSV renderings of a run record; stable column order, 12 significant
// digits. Deterministic for a fixed scenario and seed.
std::string render_summary_csv(const RunRecord& record);
std::string render_rates_csv(const RunRecord& record);
std::string render_trace_csv(const RunRecord& record);
std::string render_frontier_csv(const RunRecord& record);
std::string render_summary_json(const RunRecord& record);

std::string render_validation_json(const ValidationReport& report);
std::string render_limits_json(const LimitsReport& report);

// Writes the record's files under `directory` (created if needed):
// summary.csv, rates.csv, trace.csv, summary.json, frontier.csv when any
// point carries a TDMA frontier, channels.csv when dumped.
void emit_outputs(const RunRecord& record, const std::string& directory);
void emit_validation(const ValidationReport& report, const std::string& directory);
void emit_limits(const LimitsReport& report, const std::string& directory);

}  // namespace simbf
