#include "scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace simbf {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError("scenario: " + where + ": " + what);
}

const json& require(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) fail(where, "missing required field '" + key + "'");
  return j.at(key);
}

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& item : j.items()) {
    if (std::find_if(keys.begin(), keys.end(), [&](const char* k) { return item.key() == k; }) ==
        keys.end()) {
      fail(where, "unknown field '" + item.key() + "'");
    }
  }
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<int>();
}

// Tagged quantity {"value": ..., "unit": "..."}; bare numbers are rejected
// so that every dimensioned field names its unit.
struct Quantity {
  json value;
  std::string unit;
};

Quantity quantity(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected {\"value\": ..., \"unit\": ...}");
  check_keys(j, where, {"value", "unit"});
  Quantity q;
  q.value = require(j, "value", where);
  const json& u = require(j, "unit", where);
  if (!u.is_string()) fail(where, "unit must be a string");
  q.unit = u.get<std::string>();
  return q;
}

double length_m(const json& j, double lambda_c, const std::string& where) {
  const Quantity q = quantity(j, where);
  const double v = number(q.value, where);
  if (q.unit == "m") return v;
  if (q.unit == "mm") return v * 1e-3;
  if (q.unit == "wavelengths") return v * lambda_c;
  fail(where, "unknown length unit '" + q.unit + "' (expected m, mm or wavelengths)");
}

double power_w(const json& j, const std::string& where) {
  const Quantity q = quantity(j, where);
  const double v = number(q.value, where);
  if (q.unit == "W") return v;
  if (q.unit == "dBm") return dbm_to_watts(v);
  fail(where, "unknown power unit '" + q.unit + "' (expected W or dBm)");
}

double noise_density_w_per_hz(const json& j, const std::string& where) {
  const Quantity q = quantity(j, where);
  const double v = number(q.value, where);
  if (q.unit == "W_per_Hz") return v;
  if (q.unit == "dBm_per_Hz") return dbm_to_watts(v);
  fail(where, "unknown noise unit '" + q.unit + "' (expected W_per_Hz or dBm_per_Hz)");
}

Vec3 position_m(const json& j, const std::string& where) {
  const Quantity q = quantity(j, where);
  if (q.unit != "m") fail(where, "positions must be tagged in meters");
  if (!q.value.is_array() || q.value.size() != 3) fail(where, "expected a 3-vector");
  return Vec3(number(q.value[0], where), number(q.value[1], where), number(q.value[2], where));
}

std::pair<int, int> grid_counts(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) fail(where, "expected [count_x, count_y]");
  return {integer(j[0], where), integer(j[1], where)};
}

PhaseErrorFamily family_from_string(const std::string& s, const std::string& where) {
  if (s == "none") return PhaseErrorFamily::None;
  if (s == "uniform") return PhaseErrorFamily::Uniform;
  if (s == "von_mises") return PhaseErrorFamily::VonMises;
  fail(where, "unknown phase error family '" + s + "'");
}

}  // namespace

const std::vector<std::string>& sweepable_parameters() {
  static const std::vector<std::string> params = {
      "tx_power_dbm", "subcarriers", "layers", "sigma_p_sq", "num_users",
      "layer_spacing_wavelengths"};
  return params;
}

Scenario scenario_from_json(const json& j) {
  check_keys(j, "top level",
             {"name", "seed", "threads", "carrier", "noise_density", "tx_power", "sim",
              "phase_error", "coupling", "channel_model", "users", "optimizer",
              "power_allocation", "tdma_baseline", "sweep", "output"});
  Scenario s;
  if (j.contains("name")) {
    if (!j.at("name").is_string()) fail("name", "expected a string");
    s.name = j.at("name").get<std::string>();
  }
  const json& seed = require(j, "seed", "top level");
  if (!seed.is_number_unsigned() && !seed.is_number_integer()) fail("seed", "expected an integer");
  s.seed = seed.get<uint64_t>();
  if (j.contains("threads")) s.threads = integer(j.at("threads"), "threads");

  const json& carrier = require(j, "carrier", "top level");
  check_keys(carrier, "carrier", {"frequency_hz", "bandwidth_hz", "subcarriers"});
  s.carrier_hz = number(require(carrier, "frequency_hz", "carrier"), "carrier.frequency_hz");
  s.bandwidth_hz = number(require(carrier, "bandwidth_hz", "carrier"), "carrier.bandwidth_hz");
  s.subcarriers = integer(require(carrier, "subcarriers", "carrier"), "carrier.subcarriers");
  if (!(s.carrier_hz > 0.0)) fail("carrier.frequency_hz", "must be positive");
  const double lambda_c = kSpeedOfLight / s.carrier_hz;

  s.noise_density_w_per_hz =
      noise_density_w_per_hz(require(j, "noise_density", "top level"), "noise_density");
  s.tx_power_total_w = power_w(require(j, "tx_power", "top level"), "tx_power");

  const json& sim = require(j, "sim", "top level");
  check_keys(sim, "sim",
             {"layers", "elements", "element_size", "layer_spacing", "feeds", "feed_spacing",
              "feed_z_offset", "beta_subgrid"});
  const int layers = integer(require(sim, "layers", "sim"), "sim.layers");
  if (layers < 0) fail("sim.layers", "must be >= 0");
  auto [ex, ey] = grid_counts(require(sim, "elements", "sim"), "sim.elements");
  s.geometry.elements_x = ex;
  s.geometry.elements_y = ey;
  {
    const json& es = require(sim, "element_size", "sim");
    const Quantity q = quantity(es, "sim.element_size");
    if (q.value.is_array()) {
      if (q.value.size() != 2) fail("sim.element_size", "expected scalar or [dx, dy]");
      s.geometry.element_size_x = length_m(
          json{{"value", q.value[0]}, {"unit", q.unit}}, lambda_c, "sim.element_size");
      s.geometry.element_size_y = length_m(
          json{{"value", q.value[1]}, {"unit", q.unit}}, lambda_c, "sim.element_size");
    } else {
      const double v = length_m(es, lambda_c, "sim.element_size");
      s.geometry.element_size_x = v;
      s.geometry.element_size_y = v;
    }
  }
  {
    const json& ls = require(sim, "layer_spacing", "sim");
    const Quantity q = quantity(ls, "sim.layer_spacing");
    if (q.value.is_array()) {
      if (static_cast<int>(q.value.size()) != layers) {
        fail("sim.layer_spacing", "list length must equal sim.layers");
      }
      for (const auto& item : q.value) {
        s.geometry.layer_spacings.push_back(length_m(json{{"value", item}, {"unit", q.unit}},
                                                     lambda_c, "sim.layer_spacing"));
      }
    } else {
      const double v = length_m(ls, lambda_c, "sim.layer_spacing");
      s.uniform_layer_spacing_m = v;
      s.geometry.layer_spacings.assign(layers, v);
    }
  }
  auto [fx, fy] = grid_counts(require(sim, "feeds", "sim"), "sim.feeds");
  s.geometry.feeds_x = fx;
  s.geometry.feeds_y = fy;
  {
    const double v = length_m(require(sim, "feed_spacing", "sim"), lambda_c, "sim.feed_spacing");
    s.geometry.feed_spacing_x = v;
    s.geometry.feed_spacing_y = v;
  }
  if (sim.contains("feed_z_offset")) {
    s.geometry.feed_z_offset = length_m(sim.at("feed_z_offset"), lambda_c, "sim.feed_z_offset");
  }
  if (sim.contains("beta_subgrid")) {
    s.beta_subgrid = integer(sim.at("beta_subgrid"), "sim.beta_subgrid");
    if (s.beta_subgrid < 1) fail("sim.beta_subgrid", "must be >= 1");
  }

  if (j.contains("phase_error")) {
    const json& pe = j.at("phase_error");
    check_keys(pe, "phase_error", {"family", "sigma_p_sq"});
    const json& fam = require(pe, "family", "phase_error");
    if (!fam.is_string()) fail("phase_error.family", "expected a string");
    s.error_family = family_from_string(fam.get<std::string>(), "phase_error.family");
    if (pe.contains("sigma_p_sq")) {
      s.sigma_p_sq = number(pe.at("sigma_p_sq"), "phase_error.sigma_p_sq");
    }
  }

  if (j.contains("coupling")) {
    const json& c = j.at("coupling");
    check_keys(c, "coupling",
               {"enabled", "dipole_length", "antenna_impedance_ohm", "load_impedance_ohm"});
    if (c.contains("enabled")) {
      if (!c.at("enabled").is_boolean()) fail("coupling.enabled", "expected a boolean");
      s.coupling_enabled = c.at("enabled").get<bool>();
    }
    if (c.contains("dipole_length")) {
      s.dipole_length_m = length_m(c.at("dipole_length"), lambda_c, "coupling.dipole_length");
    }
    if (c.contains("antenna_impedance_ohm")) {
      s.antenna_impedance = number(c.at("antenna_impedance_ohm"), "coupling.antenna_impedance_ohm");
    }
    if (c.contains("load_impedance_ohm")) {
      s.load_impedance = number(c.at("load_impedance_ohm"), "coupling.load_impedance_ohm");
    }
  }
  if (s.coupling_enabled && !(s.dipole_length_m > 0.0)) {
    s.dipole_length_m = 0.5 * lambda_c;
  }

  if (j.contains("channel_model")) {
    const json& cm = j.at("channel_model");
    if (!cm.is_string()) fail("channel_model", "expected a string");
    const std::string model = cm.get<std::string>();
    if (model == "near_field") {
      s.far_field = false;
    } else if (model == "far_field") {
      s.far_field = true;
    } else {
      fail("channel_model", "expected near_field or far_field");
    }
  }

  const json& users = require(j, "users", "top level");
  if (!users.is_array() || users.empty()) fail("users", "expected a nonempty array");
  for (size_t u = 0; u < users.size(); ++u) {
    const std::string where = "users[" + std::to_string(u) + "]";
    check_keys(users[u], where, {"position"});
    s.users.push_back(position_m(require(users[u], "position", where), where + ".position"));
  }

  if (j.contains("optimizer")) {
    const json& o = j.at("optimizer");
    check_keys(o, "optimizer", {"epsilon", "max_sweeps"});
    if (o.contains("epsilon")) s.optimizer.epsilon = number(o.at("epsilon"), "optimizer.epsilon");
    if (o.contains("max_sweeps")) {
      s.optimizer.max_sweeps = integer(o.at("max_sweeps"), "optimizer.max_sweeps");
    }
  }

  if (j.contains("power_allocation")) {
    const json& p = j.at("power_allocation");
    check_keys(p, "power_allocation", {"coupling", "tolerance", "max_iterations"});
    if (p.contains("coupling")) {
      const std::string mode = p.at("coupling").get<std::string>();
      if (mode == "per_subcarrier") {
        s.power.coupling = PowerCoupling::PerSubcarrier;
      } else if (mode == "shared") {
        s.power.coupling = PowerCoupling::Shared;
      } else {
        fail("power_allocation.coupling", "expected per_subcarrier or shared");
      }
    }
    if (p.contains("tolerance")) {
      s.power.tolerance = number(p.at("tolerance"), "power_allocation.tolerance");
    }
    if (p.contains("max_iterations")) {
      s.power.max_iterations = integer(p.at("max_iterations"), "power_allocation.max_iterations");
    }
  }

  if (j.contains("tdma_baseline")) {
    if (!j.at("tdma_baseline").is_boolean()) fail("tdma_baseline", "expected a boolean");
    s.tdma_baseline = j.at("tdma_baseline").get<bool>();
  }

  if (j.contains("sweep")) {
    const json& sweep = j.at("sweep");
    if (!sweep.is_array()) fail("sweep", "expected an array of {parameter, values}");
    for (size_t i = 0; i < sweep.size(); ++i) {
      const std::string where = "sweep[" + std::to_string(i) + "]";
      check_keys(sweep[i], where, {"parameter", "values"});
      SweepAxis axis;
      axis.parameter = require(sweep[i], "parameter", where).get<std::string>();
      const json& values = require(sweep[i], "values", where);
      if (!values.is_array()) fail(where + ".values", "expected an array");
      for (const auto& v : values) axis.values.push_back(number(v, where + ".values"));
      s.sweeps.push_back(std::move(axis));
    }
  }

  if (j.contains("output")) {
    const json& o = j.at("output");
    check_keys(o, "output", {"directory", "channel_dump"});
    if (o.contains("directory")) s.output.directory = o.at("directory").get<std::string>();
    if (o.contains("channel_dump")) s.output.channel_dump = o.at("channel_dump").get<bool>();
  }

  validate_scenario(s);
  return s;
}

Scenario parse_scenario_text(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("scenario: " + origin + ": " + e.what());
  }
  return scenario_from_json(j);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("scenario: cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_text(buffer.str(), path);
}

void validate_scenario(const Scenario& s) {
  try {
    make_wideband(s).validate();      // checks carrier/bandwidth/K/noise/power
    build_urpa_geometry(s.geometry);  // checks counts and spacings
    s.optimizer.validate();
    phase_error_from_variance(s.error_family, s.sigma_p_sq);
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }
  if (!(s.power.tolerance > 0.0)) fail("power_allocation.tolerance", "must be positive");
  if (s.power.max_iterations < 1) fail("power_allocation.max_iterations", "must be >= 1");
  if (!(s.sigma_p_sq >= 0.0)) fail("phase_error.sigma_p_sq", "must be nonnegative");
  if (s.users.empty()) fail("users", "at least one user is required");
  if (s.tdma_baseline && s.users.size() != 2) {
    fail("tdma_baseline", "the TDMA baseline compares exactly two users");
  }
  for (const auto& axis : s.sweeps) {
    const auto& params = sweepable_parameters();
    if (std::find(params.begin(), params.end(), axis.parameter) == params.end()) {
      fail("sweep", "unknown sweep parameter '" + axis.parameter + "'");
    }
    if (axis.parameter == "layers" && !s.uniform_layer_spacing_m) {
      fail("sweep", "sweeping layers requires a scalar sim.layer_spacing");
    }
  }
}

WidebandConfig make_wideband(const Scenario& s) {
  WidebandConfig w;
  w.carrier_hz = s.carrier_hz;
  w.bandwidth_hz = s.bandwidth_hz;
  w.subcarriers = s.subcarriers;
  w.noise_per_subcarrier_w = s.noise_density_w_per_hz * s.bandwidth_hz / s.subcarriers;
  w.tx_power_w.assign(s.subcarriers, s.tx_power_total_w / s.subcarriers);
  return w;
}

ChannelBuildOptions make_channel_options(const Scenario& s) {
  ChannelBuildOptions o;
  o.beta_subgrid = s.beta_subgrid;
  o.coupling_enabled = s.coupling_enabled;
  o.dipole_length = s.dipole_length_m;
  o.antenna_impedance = s.antenna_impedance;
  o.load_impedance = s.load_impedance;
  o.far_field = s.far_field;
  o.far_field_c0_db = s.far_field_c0_db;
  return o;
}

void apply_sweep_assignment(Scenario& s, const std::string& parameter, double value) {
  if (parameter == "tx_power_dbm") {
    s.tx_power_total_w = dbm_to_watts(value);
  } else if (parameter == "subcarriers") {
    s.subcarriers = static_cast<int>(value);
  } else if (parameter == "layers") {
    if (!s.uniform_layer_spacing_m) {
      throw ParseError("sweep: sweeping layers requires a scalar sim.layer_spacing");
    }
    s.geometry.layer_spacings.assign(static_cast<int>(value), *s.uniform_layer_spacing_m);
  } else if (parameter == "sigma_p_sq") {
    s.sigma_p_sq = value;
  } else if (parameter == "num_users") {
    const int n = static_cast<int>(value);
    if (n < 1 || n > static_cast<int>(s.users.size())) {
      throw ParseError("sweep: num_users must select a prefix of the configured users");
    }
    s.users.resize(n);
  } else if (parameter == "layer_spacing_wavelengths") {
    const double lambda_c = kSpeedOfLight / s.carrier_hz;
    const double spacing = value * lambda_c;
    s.uniform_layer_spacing_m = spacing;
    s.geometry.layer_spacings.assign(s.geometry.layer_spacings.size(), spacing);
  } else {
    throw ParseError("sweep: unknown parameter '" + parameter + "'");
  }
}

nlohmann::json scenario_to_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["seed"] = s.seed;
  j["threads"] = s.threads;
  j["carrier"] = {{"frequency_hz", s.carrier_hz},
                  {"bandwidth_hz", s.bandwidth_hz},
                  {"subcarriers", s.subcarriers}};
  j["noise_density"] = {{"value", s.noise_density_w_per_hz}, {"unit", "W_per_Hz"}};
  j["tx_power"] = {{"value", s.tx_power_total_w}, {"unit", "W"}};
  json sim;
  sim["layers"] = static_cast<int>(s.geometry.layer_spacings.size());
  sim["elements"] = {s.geometry.elements_x, s.geometry.elements_y};
  sim["element_size"] = {{"value", {s.geometry.element_size_x, s.geometry.element_size_y}},
                         {"unit", "m"}};
  if (s.uniform_layer_spacing_m) {
    sim["layer_spacing"] = {{"value", *s.uniform_layer_spacing_m}, {"unit", "m"}};
  } else {
    sim["layer_spacing"] = {{"value", s.geometry.layer_spacings}, {"unit", "m"}};
  }
  sim["feeds"] = {s.geometry.feeds_x, s.geometry.feeds_y};
  sim["feed_spacing"] = {{"value", s.geometry.feed_spacing_x}, {"unit", "m"}};
  sim["feed_z_offset"] = {{"value", s.geometry.feed_z_offset}, {"unit", "m"}};
  sim["beta_subgrid"] = s.beta_subgrid;
  j["sim"] = std::move(sim);
  j["phase_error"] = {{"family", phase_error_family_name(s.error_family)},
                      {"sigma_p_sq", s.sigma_p_sq}};
  j["coupling"] = {{"enabled", s.coupling_enabled},
                   {"dipole_length", {{"value", s.dipole_length_m}, {"unit", "m"}}},
                   {"antenna_impedance_ohm", s.antenna_impedance},
                   {"load_impedance_ohm", s.load_impedance}};
  j["channel_model"] = s.far_field ? "far_field" : "near_field";
  json users = json::array();
  for (const auto& u : s.users) {
    users.push_back({{"position", {{"value", {u.x(), u.y(), u.z()}}, {"unit", "m"}}}});
  }
  j["users"] = std::move(users);
  j["optimizer"] = {{"epsilon", s.optimizer.epsilon}, {"max_sweeps", s.optimizer.max_sweeps}};
  j["power_allocation"] = {
      {"coupling", s.power.coupling == PowerCoupling::Shared ? "shared" : "per_subcarrier"},
      {"tolerance", s.power.tolerance},
      {"max_iterations", s.power.max_iterations}};
  j["tdma_baseline"] = s.tdma_baseline;
  json sweep = json::array();
  for (const auto& axis : s.sweeps) {
    sweep.push_back({{"parameter", axis.parameter}, {"values", axis.values}});
  }
  j["sweep"] = std::move(sweep);
  j["output"] = {{"directory", s.output.directory}, {"channel_dump", s.output.channel_dump}};
  return j;
}

std::string scenario_hash(const Scenario& s) {
  // Runtime knobs (worker count, output paths) do not change the experiment.
  json canonical = scenario_to_json(s);
  canonical.erase("threads");
  canonical.erase("output");
  const std::string dump = canonical.dump();
  uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace simbf
