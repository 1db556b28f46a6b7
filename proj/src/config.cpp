#include "cavread/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cavread/errors.hpp"

namespace cavread {

using nlohmann::json;

namespace {

constexpr std::string_view kPaperScenario = R"({
  "scenario": "paper",
  "seed": 1,
  "trials": 100000,
  "output": "",

  // Atom-cavity rates, 2pi MHz. kappa and gamma are field half-widths; C = 107.6.
  "cavity": {"g": 185.0, "kappa": 53.0, "gamma": 3.0},

  // Measured outgoing power per channel, percent of the incident light:
  // transmitted, reflected, lost (main mode), then the same for the detuned mode.
  "channels": {
    "state0_percent": [12.7, 41.4, 45.9, 0.0, 0.0, 0.0],
    "state1_percent": [0.1, 99.0, 0.4, 0.1, 0.1, 0.4],
    "norm_slack": 0.005  // the state-1 row sums to 100.1% after rounding
  },

  // Cavity transmission and reflection per qubit state.
  "counting": {"T0": 0.13, "T1": 0.0024, "R0": 0.42, "R1": 0.99},
  // Detection efficiencies of the transmission and reflection paths.
  "detectors": {"transmission": 0.47, "reflection": 0.31},
  // Depumping out of the bright state, 1/142 per incident photon.
  "jumps": {"prob_per_photon_state1": 0.007042253521126761, "prob_per_photon_state0": 0.0},

  // Microwave pi-pulse of 8.8 us; transfer saturates between 2% and 95%;
  // fitted n_tilde = a0 n with a0 = 0.37.
  "zeno": {"tau_us": 8.8, "p_floor": 0.02, "p_ceiling": 0.95, "a0": 0.37},

  // Survival in the bright state: initial slope 1/142, asymptote 0.27,
  // Gamma_P/Gamma = 2.6.
  "depump": {"nu": 0.007042253521126761, "gamma_ratio": 2.6, "s_inf": 0.27},

  // Two-mode master equation. The second mode is 540 MHz detuned with
  // orthogonal linear polarisation.
  "lindblad": {
    "second_mode_detuning": 540.0,
    "second_mode_coupling": 0.7071067811865476,
    "larmor_frequency": 1.0,
    "drive_photons": 1e-8,
    "n_max": 1,
    "mirror_T0": 0.13,
    "recycle_bright_state": true
  },

  // Knowledge exponents per incident photon: back action 2 a0, ideal
  // detectors, and the experiment. photons_per_scatter = 0 derives n/m from
  // the depumping parameters (118).
  "figure4": {
    "back_action_per_photon": 0.74,
    "perfect_detectors_per_photon": 0.11,
    "experiment_per_photon": 0.046,
    "photons_per_scatter": 0.0
  },

  "grids": {
    "bounds": {"min": 1.0, "max": 1000.0, "points": 31, "spacing": "log"},
    "detect": [0.0, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0, 100.0, 200.0, 500.0],
    "zeno": {"min": 0.0, "max": 20.0, "points": 41, "spacing": "linear"},
    "depump": {"min": 0.0, "max": 1000.0, "points": 51, "spacing": "linear"},
    "figure4": {"min": 0.01, "max": 100.0, "points": 41, "spacing": "log"}
  }
})";

const char* type_name(const json& j) { return j.type_name(); }

bool same_kind(const json& a, const json& b) {
  if (a.is_number() && b.is_number()) return true;
  return a.type() == b.type();
}

const json& at(const json& j, std::string_view key, const std::string& path) {
  const auto it = j.find(std::string(key));
  if (it == j.end()) throw ConfigError("missing key '" + path + std::string(key) + "'");
  return *it;
}

double get_number(const json& j, std::string_view key, const std::string& path) {
  const auto& v = at(j, key, path);
  if (!v.is_number()) throw ConfigError("'" + path + std::string(key) + "' must be a number");
  return v.get<double>();
}

std::int64_t get_integer(const json& j, std::string_view key, const std::string& path) {
  const auto& v = at(j, key, path);
  if (!v.is_number_integer()) throw ConfigError("'" + path + std::string(key) + "' must be an integer");
  return v.get<std::int64_t>();
}

std::uint64_t get_unsigned(const json& j, std::string_view key, const std::string& path) {
  const auto& v = at(j, key, path);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    throw ConfigError("'" + path + std::string(key) + "' must be a non-negative integer");
  return v.get<std::uint64_t>();
}

std::string get_string(const json& j, std::string_view key, const std::string& path) {
  const auto& v = at(j, key, path);
  if (!v.is_string()) throw ConfigError("'" + path + std::string(key) + "' must be a string");
  return v.get<std::string>();
}

bool get_bool(const json& j, std::string_view key, const std::string& path) {
  const auto& v = at(j, key, path);
  if (!v.is_boolean()) throw ConfigError("'" + path + std::string(key) + "' must be true or false");
  return v.get<bool>();
}

ChannelAmplitudeTable::Row get_row(const json& j, std::string_view key, const std::string& path) {
  const auto& v = at(j, key, path);
  if (!v.is_array() || v.size() != kChannelCount)
    throw ConfigError("'" + path + std::string(key) + "' must be an array of 6 numbers");
  ChannelAmplitudeTable::Row row{};
  for (std::size_t i = 0; i < kChannelCount; ++i) {
    if (!v[i].is_number()) throw ConfigError("'" + path + std::string(key) + "' must be an array of 6 numbers");
    row[i] = v[i].get<double>();
  }
  return row;
}

Grid get_grid(const json& j, std::string_view key, const std::string& path) {
  const auto& v = at(j, key, path);
  const std::string p = path + std::string(key) + ".";
  Grid g;
  g.min = get_number(v, "min", p);
  g.max = get_number(v, "max", p);
  const auto points = get_integer(v, "points", p);
  if (points < 1 || points > 100000) throw ConfigError("'" + p + "points' must lie in [1, 100000]");
  g.points = static_cast<int>(points);
  const auto spacing = get_string(v, "spacing", p);
  if (spacing != "log" && spacing != "linear") throw ConfigError("'" + p + "spacing' must be \"log\" or \"linear\"");
  g.log_spacing = spacing == "log";
  return g;
}

json grid_json(const Grid& g) {
  return {{"min", g.min}, {"max", g.max}, {"points", g.points}, {"spacing", g.log_spacing ? "log" : "linear"}};
}

json improved_cavity_patch() {
  ImprovedScenario s;
  s.loss_scale = 0.25;
  s.eta_t = 0.7;
  s.eta_r = 0.7;
  s.response = AtomResponse::SingleMode;
  const auto r = improved_scenario(s);
  const CavityParams base{};
  const double kappa = base.g * base.g / (2.0 * base.gamma * r.cooperativity);
  const auto lost = [](double a, double b) { return std::max(0.0, 100.0 * (1.0 - a - b)); };
  return {
      {"scenario", "improved-cavity"},
      {"cavity", {{"kappa", kappa}}},
      {"channels",
       {{"state0_percent", {100.0 * r.T0, 100.0 * r.R0, lost(r.T0, r.R0), 0.0, 0.0, 0.0}},
        {"state1_percent", {100.0 * r.T1, 100.0 * r.R1, lost(r.T1, r.R1), 0.0, 0.0, 0.0}},
        {"norm_slack", 1e-9}}},
      {"counting", {{"T0", r.T0}, {"T1", r.T1}, {"R0", r.R0}, {"R1", r.R1}}},
      {"detectors", {{"transmission", s.eta_t}, {"reflection", s.eta_r}}},
      {"lindblad", {{"mirror_T0", r.T0}}},
      {"figure4",
       {{"perfect_detectors_per_photon", chernoff_exponent({r.T0, r.T1, r.R0, r.R1}).xi},
        {"experiment_per_photon", r.xi_per_photon},
        {"photons_per_scatter", r.photons_per_scatter}}},
  };
}

json ideal_fluorescence_patch() {
  return {
      {"scenario", "ideal-fluorescence"},
      {"channels",
       {{"state0_percent", {100.0, 0.0, 0.0, 0.0, 0.0, 0.0}},
        {"state1_percent", {0.0, 0.0, 100.0, 0.0, 0.0, 0.0}},
        {"norm_slack", 1e-9}}},
      {"counting", {{"T0", 1.0}, {"T1", 0.0}, {"R0", 0.0}, {"R1", 0.0}}},
      {"detectors", {{"transmission", 1.0}, {"reflection", 1.0}}},
      {"jumps", {{"prob_per_photon_state1", 0.0}, {"prob_per_photon_state0", 0.0}}},
  };
}

template <class F>
void check(const char* section, F&& f) {
  try {
    f();
  } catch (const DomainError& e) {
    throw ConfigError(std::string(section) + ": " + e.what());
  } catch (const NumericalError& e) {
    throw ConfigError(std::string(section) + ": " + e.what());
  }
}

}  // namespace

std::vector<double> Grid::values() const {
  std::vector<double> out{0.0};
  for (int k = 0; k < points; ++k) {
    const double f = points == 1 ? 0.0 : static_cast<double>(k) / (points - 1);
    const double x = log_spacing ? std::pow(10.0, std::log10(min) + (std::log10(max) - std::log10(min)) * f)
                                 : min + (max - min) * f;
    if (x > 0.0) out.push_back(x);
  }
  return out;
}

void Grid::validate(std::string_view name) const {
  const std::string n(name);
  if (!std::isfinite(min) || !std::isfinite(max) || min < 0.0 || max < min)
    throw ConfigError("grids." + n + ": need 0 <= min <= max");
  if (log_spacing && !(min > 0.0)) throw ConfigError("grids." + n + ": log spacing needs min > 0");
  if (points < 1) throw ConfigError("grids." + n + ": points must be >= 1");
}

ChannelAmplitudeTable ScenarioConfig::channel_table() const {
  auto fractions = [](const ChannelAmplitudeTable::Row& percent) {
    ChannelAmplitudeTable::Row r{};
    for (std::size_t i = 0; i < kChannelCount; ++i) r[i] = percent[i] / 100.0;
    return r;
  };
  return ChannelAmplitudeTable::from_power_fractions(fractions(channels_state0_percent),
                                                     fractions(channels_state1_percent), channel_norm_slack);
}

CountDistributions ScenarioConfig::count_distributions() const {
  return CountDistributions::from(counting, detectors);
}

double ScenarioConfig::photons_per_scatter() const {
  if (figure4.photons_per_scatter > 0.0) return figure4.photons_per_scatter;
  return 1.0 / scatter_per_photon(depump.nu, depump.gamma_ratio);
}

AtomCavitySpec ScenarioConfig::atom_spec() const {
  AtomCavitySpec s = atom;
  s.cavity = cavity;
  s.drive = drive_for_photon_number(cavity, drive_photons);
  return s;
}

void ScenarioConfig::validate() const {
  if (trials == 0) throw ConfigError("trials must be > 0");
  check("cavity", [&] { cavity.validate(); });
  check("channels", [&] { (void)channel_table(); });
  check("counting", [&] {
    for (double v : {counting.T0, counting.T1, counting.R0, counting.R1})
      if (!(v >= 0.0 && v <= 1.0)) throw DomainError("coefficients must lie in [0,1]");
  });
  check("detectors", [&] {
    for (double v : {detectors.transmission, detectors.reflection})
      if (!(v >= 0.0 && v <= 1.0)) throw DomainError("efficiencies must lie in [0,1]");
    count_distributions().validate();
  });
  check("jumps", [&] {
    for (double v : {jumps.prob_per_photon_state0, jumps.prob_per_photon_state1})
      if (!(v >= 0.0 && v <= 1.0)) throw DomainError("probabilities must lie in [0,1]");
  });
  check("zeno", [&] {
    zeno.validate();
    if (!(zeno_a0 > 0.0) || !std::isfinite(zeno_a0)) throw DomainError("a0 must be > 0");
  });
  check("depump", [&] { depump.validate(); });
  check("lindblad", [&] {
    atom.validate();
    if (!(drive_photons > 0.0 && drive_photons < kWeakDrivePhotons))
      throw DomainError("drive_photons must lie in (0, 0.01)");
    if (atom.dimension() > kMaxDimension)
      throw DomainError("n_max = " + std::to_string(atom.n_max) + " needs dimension " +
                        std::to_string(atom.dimension()) + " > " + std::to_string(kMaxDimension));
  });
  check("figure4", [&] {
    for (double v : {figure4.back_action_per_photon, figure4.perfect_detectors_per_photon,
                     figure4.experiment_per_photon, figure4.photons_per_scatter})
      if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("exponents must be finite and >= 0");
    if (!(photons_per_scatter() > 0.0)) throw DomainError("photons per scatter must be > 0");
  });
  bounds_grid.validate("bounds");
  zeno_grid.validate("zeno");
  depump_grid.validate("depump");
  figure4_grid.validate("figure4");
  if (detect_points.empty()) throw ConfigError("grids.detect must not be empty");
  for (double n : detect_points)
    if (!(n >= 0.0) || !std::isfinite(n)) throw ConfigError("grids.detect: photon numbers must be finite and >= 0");
}

std::string_view paper_scenario_text() { return kPaperScenario; }

json parse_config_text(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

json overlay(const json& base, const json& user, const std::string& path) {
  if (!user.is_object()) throw ConfigError("config " + (path.empty() ? std::string("root") : path) + " must be an object");
  json out = base;
  for (const auto& [key, value] : user.items()) {
    const std::string where = path.empty() ? key : path + "." + key;
    const auto it = base.find(key);
    if (it == base.end()) throw ConfigError("unknown config key '" + where + "'");
    if (!same_kind(*it, value))
      throw ConfigError("config key '" + where + "' must be " + type_name(*it) + ", got " + type_name(value));
    out[key] = it->is_object() ? overlay(*it, value, where) : value;
  }
  return out;
}

json scenario_defaults_json(std::string_view name) {
  json base = parse_config_text(kPaperScenario);
  if (name == "paper") return base;
  if (name == "custom") {
    base["scenario"] = "custom";
    return base;
  }
  if (name == "ideal-fluorescence") return overlay(base, ideal_fluorescence_patch());
  if (name == "improved-cavity") return overlay(base, improved_cavity_patch());
  throw ConfigError("unknown scenario '" + std::string(name) +
                    "' (expected paper, ideal-fluorescence, improved-cavity or custom)");
}

ScenarioConfig scenario_defaults(std::string_view name) {
  auto cfg = config_from_json(scenario_defaults_json(name));
  cfg.validate();
  return cfg;
}

json to_json(const ScenarioConfig& c) {
  return {
      {"scenario", c.scenario},
      {"seed", c.seed},
      {"trials", c.trials},
      {"output", c.output},
      {"cavity", {{"g", c.cavity.g}, {"kappa", c.cavity.kappa}, {"gamma", c.cavity.gamma}}},
      {"channels",
       {{"state0_percent", c.channels_state0_percent},
        {"state1_percent", c.channels_state1_percent},
        {"norm_slack", c.channel_norm_slack}}},
      {"counting", {{"T0", c.counting.T0}, {"T1", c.counting.T1}, {"R0", c.counting.R0}, {"R1", c.counting.R1}}},
      {"detectors", {{"transmission", c.detectors.transmission}, {"reflection", c.detectors.reflection}}},
      {"jumps",
       {{"prob_per_photon_state1", c.jumps.prob_per_photon_state1},
        {"prob_per_photon_state0", c.jumps.prob_per_photon_state0}}},
      {"zeno",
       {{"tau_us", c.zeno.tau_us}, {"p_floor", c.zeno.p_floor}, {"p_ceiling", c.zeno.p_ceiling}, {"a0", c.zeno_a0}}},
      {"depump", {{"nu", c.depump.nu}, {"gamma_ratio", c.depump.gamma_ratio}, {"s_inf", c.depump.s_inf}}},
      {"lindblad",
       {{"second_mode_detuning", c.atom.second_mode_detuning},
        {"second_mode_coupling", c.atom.second_mode_coupling},
        {"larmor_frequency", c.atom.larmor_frequency},
        {"drive_photons", c.drive_photons},
        {"n_max", c.atom.n_max},
        {"mirror_T0", c.atom.mirror_T0},
        {"recycle_bright_state", c.atom.recycle_bright_state}}},
      {"figure4",
       {{"back_action_per_photon", c.figure4.back_action_per_photon},
        {"perfect_detectors_per_photon", c.figure4.perfect_detectors_per_photon},
        {"experiment_per_photon", c.figure4.experiment_per_photon},
        {"photons_per_scatter", c.figure4.photons_per_scatter}}},
      {"grids",
       {{"bounds", grid_json(c.bounds_grid)},
        {"detect", c.detect_points},
        {"zeno", grid_json(c.zeno_grid)},
        {"depump", grid_json(c.depump_grid)},
        {"figure4", grid_json(c.figure4_grid)}}},
  };
}

ScenarioConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config root must be an object");
  ScenarioConfig c;
  c.scenario = get_string(j, "scenario", "");
  c.seed = get_unsigned(j, "seed", "");
  c.trials = get_unsigned(j, "trials", "");
  c.output = get_string(j, "output", "");

  const auto& cav = at(j, "cavity", "");
  c.cavity = {get_number(cav, "g", "cavity."), get_number(cav, "kappa", "cavity."),
              get_number(cav, "gamma", "cavity.")};

  const auto& ch = at(j, "channels", "");
  c.channels_state0_percent = get_row(ch, "state0_percent", "channels.");
  c.channels_state1_percent = get_row(ch, "state1_percent", "channels.");
  c.channel_norm_slack = get_number(ch, "norm_slack", "channels.");

  const auto& co = at(j, "counting", "");
  c.counting = {get_number(co, "T0", "counting."), get_number(co, "T1", "counting."),
                get_number(co, "R0", "counting."), get_number(co, "R1", "counting.")};
  const auto& de = at(j, "detectors", "");
  c.detectors = {get_number(de, "transmission", "detectors."), get_number(de, "reflection", "detectors.")};
  const auto& ju = at(j, "jumps", "");
  c.jumps = {get_number(ju, "prob_per_photon_state1", "jumps."), get_number(ju, "prob_per_photon_state0", "jumps.")};

  const auto& ze = at(j, "zeno", "");
  c.zeno.tau_us = get_number(ze, "tau_us", "zeno.");
  c.zeno.p_floor = get_number(ze, "p_floor", "zeno.");
  c.zeno.p_ceiling = get_number(ze, "p_ceiling", "zeno.");
  c.zeno_a0 = get_number(ze, "a0", "zeno.");

  const auto& dp = at(j, "depump", "");
  c.depump = {get_number(dp, "nu", "depump."), get_number(dp, "gamma_ratio", "depump."),
              get_number(dp, "s_inf", "depump.")};

  const auto& li = at(j, "lindblad", "");
  c.atom.second_mode_detuning = get_number(li, "second_mode_detuning", "lindblad.");
  c.atom.second_mode_coupling = get_number(li, "second_mode_coupling", "lindblad.");
  c.atom.larmor_frequency = get_number(li, "larmor_frequency", "lindblad.");
  c.drive_photons = get_number(li, "drive_photons", "lindblad.");
  const auto n_max = get_integer(li, "n_max", "lindblad.");
  if (n_max < 1 || n_max > 64) throw ConfigError("'lindblad.n_max' must lie in [1, 64]");
  c.atom.n_max = static_cast<int>(n_max);
  c.atom.mirror_T0 = get_number(li, "mirror_T0", "lindblad.");
  c.atom.recycle_bright_state = get_bool(li, "recycle_bright_state", "lindblad.");
  c.atom.cavity = c.cavity;

  const auto& f4 = at(j, "figure4", "");
  c.figure4 = {get_number(f4, "back_action_per_photon", "figure4."),
               get_number(f4, "perfect_detectors_per_photon", "figure4."),
               get_number(f4, "experiment_per_photon", "figure4."), get_number(f4, "photons_per_scatter", "figure4.")};

  const auto& gr = at(j, "grids", "");
  c.bounds_grid = get_grid(gr, "bounds", "grids.");
  c.zeno_grid = get_grid(gr, "zeno", "grids.");
  c.depump_grid = get_grid(gr, "depump", "grids.");
  c.figure4_grid = get_grid(gr, "figure4", "grids.");
  const auto& dt = at(gr, "detect", "grids.");
  if (!dt.is_array()) throw ConfigError("'grids.detect' must be an array of numbers");
  for (const auto& v : dt) {
    if (!v.is_number()) throw ConfigError("'grids.detect' must be an array of numbers");
    c.detect_points.push_back(v.get<double>());
  }
  return c;
}

ScenarioConfig load_config(const std::optional<std::filesystem::path>& file,
                           const std::optional<std::string>& scenario_name) {
  json user = json::object();
  if (file) {
    std::ifstream in(*file);
    if (!in) throw ConfigError("cannot open config file '" + file->string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    user = parse_config_text(ss.str());
    if (!user.is_object()) throw ConfigError("config root must be an object");
  }

  std::string name = "paper";
  if (scenario_name) {
    name = *scenario_name;
  } else if (const auto it = user.find("scenario"); it != user.end()) {
    if (!it->is_string()) throw ConfigError("'scenario' must be a string");
    name = it->get<std::string>();
  }
  if (name == "custom" && !file) throw ConfigError("the custom scenario needs --config");

  json merged = overlay(scenario_defaults_json(name), user);
  merged["scenario"] = name;
  auto cfg = config_from_json(merged);
  cfg.validate();
  return cfg;
}

}  // namespace cavread
