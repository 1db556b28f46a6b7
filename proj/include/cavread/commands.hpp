#pragma once

// CSV generators behind the command-line subcommands. Each writes a "# key: value"
// preamble (command, scenario, seed, version), a header row and data rows.

#include <ostream>
#include <string_view>

#include "cavread/config.hpp"

namespace cavread {

/// n, eps_H, I_max, I_accessible_model
void cmd_bounds(const ScenarioConfig& cfg, std::ostream& out);
/// n, eps_mc, ci, eps_exact, eps_mc_jumps
void cmd_detect(const ScenarioConfig& cfg, std::ostream& out);
/// n, p_obs_model_state1, p_obs_model_state0, n_tilde
void cmd_zeno(const ScenarioConfig& cfg, std::ostream& out);
/// n, S_model
void cmd_depump(const ScenarioConfig& cfg, std::ostream& out);
/// quantity, value
void cmd_lindblad(const ScenarioConfig& cfg, std::ostream& out);
/// m, free_space_bound, I_max_cavity, I_acc_perfect_detectors, I_acc_experiment
void cmd_figure4(const ScenarioConfig& cfg, std::ostream& out);
/// The resolved configuration as JSON.
void cmd_validate_config(const ScenarioConfig& cfg, std::ostream& out);

inline constexpr std::string_view kCommandNames[] = {"bounds", "detect",  "zeno",           "depump",
                                                     "lindblad", "figure4", "validate-config"};

/// Dispatches on the subcommand name; throws ConfigError for unknown names.
void run_command(std::string_view name, const ScenarioConfig& cfg, std::ostream& out);

std::string_view tool_version();

}  // namespace cavread
