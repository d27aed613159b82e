#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "channel.hpp"
#include "common.hpp"
#include "geometry.hpp"
#include "holographic.hpp"
#include "phase_error.hpp"
#include "power_allocation.hpp"
#include "wideband.hpp"

namespace simbf {

struct SweepAxis {
  std::string parameter;
  std::vector<double> values;
};

struct OutputOptions {
  std::string directory = "out";
  bool channel_dump = false;
};

// One fully resolved simulation description. Lengths are meters, powers
// watts; the parser applies the declared unit tags against the carrier
// wavelength before anything else sees the values.
struct Scenario {
  std::string name = "scenario";
  uint64_t seed = 0;
  int threads = 0;  // 0: SIMBF_THREADS or hardware concurrency

  double carrier_hz = 0.0;
  double bandwidth_hz = 0.0;
  int subcarriers = 1;
  double noise_density_w_per_hz = 0.0;
  double tx_power_total_w = 0.0;  // split equally across subcarriers

  GeometryConfig geometry;
  std::optional<double> uniform_layer_spacing_m;  // set when the config gave a scalar
  int beta_subgrid = 8;

  PhaseErrorFamily error_family = PhaseErrorFamily::None;
  double sigma_p_sq = 0.0;

  bool coupling_enabled = false;
  double dipole_length_m = 0.0;
  double antenna_impedance = 50.0;
  double load_impedance = 50.0;

  std::vector<Vec3> users;
  bool far_field = false;
  double far_field_c0_db = -30.0;
  bool tdma_baseline = false;

  OptimizerSettings optimizer;
  PowerSettings power;

  std::vector<SweepAxis> sweeps;
  OutputOptions output;
};

Scenario scenario_from_json(const nlohmann::json& j);
Scenario parse_scenario_text(const std::string& text, const std::string& origin = "<string>");
Scenario load_scenario(const std::string& path);

// Canonical SI echo; reparses to the same scenario.
nlohmann::json scenario_to_json(const Scenario& s);

// FNV-1a64 over the canonical dump, 16 hex digits.
std::string scenario_hash(const Scenario& s);

void validate_scenario(const Scenario& s);

// Derived builders used by the pipeline.
WidebandConfig make_wideband(const Scenario& s);
ChannelBuildOptions make_channel_options(const Scenario& s);

// Sweep support.
const std::vector<std::string>& sweepable_parameters();
void apply_sweep_assignment(Scenario& s, const std::string& parameter, double value);

}  // namespace simbf
