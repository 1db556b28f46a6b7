#pragma once

// Scenario configuration: JSON with // comments. A user file is overlaid on the
// defaults of its scenario; keys absent from those defaults are rejected.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cavread/atom_cavity.hpp"
#include "cavread/core_model.hpp"
#include "cavread/detection_stats.hpp"
#include "cavread/scattering_model.hpp"
#include "cavread/zeno_sim.hpp"
#include "json.hpp"

namespace cavread {

/// Photon-number grid. Always starts with a 0 row; the remaining points are
/// log- or linearly spaced between min and max inclusive.
struct Grid {
  double min = 1.0;
  double max = 1000.0;
  int points = 31;
  bool log_spacing = true;

  std::vector<double> values() const;
  void validate(std::string_view name) const;
};

struct Figure4Exponents {
  double back_action_per_photon = 0.74;
  double perfect_detectors_per_photon = 0.11;
  double experiment_per_photon = 0.046;
  double photons_per_scatter = 0.0;  // 0: derive from the depumping parameters
};

struct ScenarioConfig {
  std::string scenario = "paper";
  std::uint64_t seed = 1;
  std::uint64_t trials = 100000;
  std::string output;  // empty: standard output

  CavityParams cavity;
  ChannelAmplitudeTable::Row channels_state0_percent{};
  ChannelAmplitudeTable::Row channels_state1_percent{};
  double channel_norm_slack = 5e-3;

  CountingCoefficients counting;
  DetectorEfficiency detectors;
  JumpModel jumps;

  ZenoConfig zeno;
  double zeno_a0 = 0.37;

  DepumpParams depump;

  AtomCavitySpec atom;
  double drive_photons = 1e-8;

  Figure4Exponents figure4;

  Grid bounds_grid;
  std::vector<double> detect_points;
  Grid zeno_grid{0.0, 20.0, 41, false};
  Grid depump_grid{0.0, 1000.0, 51, false};
  Grid figure4_grid{0.01, 100.0, 41, true};

  ChannelAmplitudeTable channel_table() const;
  CountDistributions count_distributions() const;
  double photons_per_scatter() const;
  /// atom with the drive resolved from drive_photons
  AtomCavitySpec atom_spec() const;

  /// Throws ConfigError naming the first offending field.
  void validate() const;
};

inline constexpr std::string_view kScenarioNames[] = {"paper", "ideal-fluorescence", "improved-cavity",
                                                      "custom"};

/// The built-in paper scenario as commented JSON.
std::string_view paper_scenario_text();

/// Defaults of a named scenario, as JSON. Throws ConfigError for unknown names.
nlohmann::json scenario_defaults_json(std::string_view name);
ScenarioConfig scenario_defaults(std::string_view name);

nlohmann::json to_json(const ScenarioConfig& cfg);
/// Strict conversion: every field must be present with the right type.
ScenarioConfig config_from_json(const nlohmann::json& j);

/// Recursively overlays `user` on `base`. Throws ConfigError for keys of `user`
/// missing from `base` or values whose type differs.
nlohmann::json overlay(const nlohmann::json& base, const nlohmann::json& user, const std::string& path = "");

/// Parses JSON text, allowing // and /* */ comments.
nlohmann::json parse_config_text(std::string_view text);

/// Resolves the scenario (explicit name, else the file's "scenario" key, else
/// "paper"), overlays the file if given and validates. The "custom" scenario
/// requires a file.
ScenarioConfig load_config(const std::optional<std::filesystem::path>& file,
                           const std::optional<std::string>& scenario_name = {});

}  // namespace cavread
