#include "cavread/commands.hpp"

#include <cmath>
#include <string>

#include "cavread/csv.hpp"
#include "cavread/errors.hpp"

namespace cavread {

namespace {

void preamble(CsvWriter& csv, std::string_view command, const ScenarioConfig& cfg) {
  csv.metadata("command", command);
  csv.metadata("scenario", cfg.scenario);
  csv.metadata("seed", std::to_string(cfg.seed));
  csv.metadata("version", tool_version());
}

void quantity(CsvWriter& csv, std::string_view name, double value) {
  csv.text_row({name, format_number(value)});
}

}  // namespace

std::string_view tool_version() { return CAVREAD_VERSION; }

void cmd_bounds(const ScenarioConfig& cfg, std::ostream& out) {
  const double zeta = zeta_from_channels(cfg.channel_table(), ChannelSet::all());
  const double xi = chernoff_exponent(cfg.counting, cfg.detectors).xi;
  CsvWriter csv(out);
  preamble(csv, "bounds", cfg);
  csv.metadata("zeta", format_number(zeta));
  csv.metadata("xi", format_number(xi));
  csv.header({"n", "eps_H", "I_max", "I_accessible_model"});
  for (double n : cfg.bounds_grid.values())
    csv.row({n, helstrom_error(std::exp(-zeta * n)), max_knowledge(zeta, n), accessible_knowledge(xi, n)});
}

void cmd_detect(const ScenarioConfig& cfg, std::ostream& out) {
  const auto d = cfg.count_distributions();
  CsvWriter csv(out);
  preamble(csv, "detect", cfg);
  csv.metadata("trials", std::to_string(cfg.trials));
  csv.header({"n", "eps_mc", "ci", "eps_exact", "eps_mc_jumps"});
  for (double n : cfg.detect_points) {
    const auto plain = empirical_error(cfg.trials, n, d, JumpModel::none(), cfg.seed);
    const auto jumps = empirical_error(cfg.trials, n, d, cfg.jumps, cfg.seed);
    csv.row({n, plain.epsilon, plain.ci_half_width, l1_error(d, n), jumps.epsilon});
  }
}

void cmd_zeno(const ScenarioConfig& cfg, std::ostream& out) {
  CsvWriter csv(out);
  preamble(csv, "zeno", cfg);
  csv.metadata("a0", format_number(cfg.zeno_a0));
  csv.header({"n", "p_obs_model_state1", "p_obs_model_state0", "n_tilde"});
  ZenoConfig one = cfg.zeno;
  one.initial = QubitState::One;
  ZenoConfig zero = cfg.zeno;
  zero.initial = QubitState::Zero;
  for (double n : cfg.zeno_grid.values()) {
    const double n_tilde = cfg.zeno_a0 * n;
    const double p1 = apply_imperfections(bloch_transfer(one, n_tilde), one);
    const double p0 = apply_imperfections(bloch_transfer(zero, n_tilde), zero);
    csv.row({n, p1, p0, infer_n_tilde(p1, one)});
  }
}

void cmd_depump(const ScenarioConfig& cfg, std::ostream& out) {
  CsvWriter csv(out);
  preamble(csv, "depump", cfg);
  csv.metadata("photons_per_scatter", format_number(1.0 / scatter_per_photon(cfg.depump.nu, cfg.depump.gamma_ratio)));
  csv.header({"n", "S_model"});
  for (double n : cfg.depump_grid.values()) csv.row({n, survival_model(n, cfg.depump)});
}

void cmd_lindblad(const ScenarioConfig& cfg, std::ostream& out) {
  const auto spec = cfg.atom_spec();
  const double C = cooperativity(cfg.cavity);
  TwoLevelSpec two;
  two.cavity = cfg.cavity;
  two.drive = spec.drive;
  two.n_max = spec.n_max;
  const auto two_budget = scatter_budget(two);
  const auto full = scatter_budget(spec);

  CsvWriter csv(out);
  preamble(csv, "lindblad", cfg);
  csv.header({"quantity", "value"});
  quantity(csv, "cooperativity", C);
  quantity(csv, "hilbert_dimension", spec.dimension());
  quantity(csv, "two_level_extinction", two_budget.extinction());
  quantity(csv, "ideal_extinction", ideal_extinction(C));
  quantity(csv, "two_level_scatter_fraction", two_budget.scattered_fraction());
  quantity(csv, "inverse_cooperativity", 1.0 / C);
  quantity(csv, "purcell_ratio", full.purcell_ratio());
  quantity(csv, "purcell_ratio_estimate", purcell_ratio_estimate(spec));
  quantity(csv, "scatter_fraction", full.scattered_fraction());
  quantity(csv, "photons_per_scatter", 1.0 / full.scattered_fraction());
  quantity(csv, "free_space_fraction", full.free_space / full.incident);
  quantity(csv, "second_mode_fraction", full.second_mode / full.incident);
  quantity(csv, "depump_prob_per_scatter", depump_prob_per_scatter(full.purcell_ratio()));
  quantity(csv, "full_extinction", full.extinction());
}

void cmd_figure4(const ScenarioConfig& cfg, std::ostream& out) {
  const double per_scatter = cfg.photons_per_scatter();
  const auto& e = cfg.figure4;
  CsvWriter csv(out);
  preamble(csv, "figure4", cfg);
  csv.metadata("photons_per_scatter", format_number(per_scatter));
  csv.header({"m", "free_space_bound", "I_max_cavity", "I_acc_perfect_detectors", "I_acc_experiment"});
  for (double m : cfg.figure4_grid.values())
    csv.row({m, free_space_bound(m), fln(e.back_action_per_photon * per_scatter * m),
             fln(e.perfect_detectors_per_photon * per_scatter * m), fln(e.experiment_per_photon * per_scatter * m)});
}

void cmd_validate_config(const ScenarioConfig& cfg, std::ostream& out) { out << to_json(cfg).dump(2) << '\n'; }

void run_command(std::string_view name, const ScenarioConfig& cfg, std::ostream& out) {
  if (name == "bounds") return cmd_bounds(cfg, out);
  if (name == "detect") return cmd_detect(cfg, out);
  if (name == "zeno") return cmd_zeno(cfg, out);
  if (name == "depump") return cmd_depump(cfg, out);
  if (name == "lindblad") return cmd_lindblad(cfg, out);
  if (name == "figure4") return cmd_figure4(cfg, out);
  if (name == "validate-config") return cmd_validate_config(cfg, out);
  throw ConfigError("unknown command '" + std::string(name) + "'");
}

}  // namespace cavread
