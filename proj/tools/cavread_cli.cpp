// cavread: regenerates the readout model curves as CSV.
//
//   cavread bounds --scenario paper --out bounds.csv
//   cavread detect --config my.json --seed 7 --trials 20000
//
// Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "cavread/commands.hpp"
#include "cavread/config.hpp"
#include "cavread/errors.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

struct Options {
  std::optional<std::string> config;
  std::optional<std::string> scenario;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::optional<std::string> out;
};

int run(const std::string& command, const Options& opt) {
  std::optional<std::filesystem::path> file;
  if (opt.config) file = *opt.config;
  auto cfg = cavread::load_config(file, opt.scenario);
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.trials) cfg.trials = *opt.trials;
  if (opt.out) cfg.output = *opt.out;
  cfg.validate();

  if (cfg.output.empty() || cfg.output == "-") {
    cavread::run_command(command, cfg, std::cout);
    return 0;
  }
  // Write to a temporary and rename so a failed run leaves no partial file.
  const std::filesystem::path target(cfg.output);
  const std::filesystem::path partial = target.string() + ".partial";
  try {
    std::ofstream out(partial, std::ios::binary);
    if (!out) throw cavread::ConfigError("cannot write '" + partial.string() + "'");
    cavread::run_command(command, cfg, out);
    if (!out) throw cavread::ConfigError("write to '" + partial.string() + "' failed");
  } catch (...) {
    std::error_code ignored;
    std::filesystem::remove(partial, ignored);
    throw;
  }
  std::filesystem::rename(partial, target);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Photon-counting readout of an atom in a cavity: bounds, simulations and model curves"};
  app.set_version_flag("--version", std::string(cavread::tool_version()));
  app.require_subcommand(1);

  Options opt;
  std::string command;
  for (auto name : cavread::kCommandNames) {
    auto* sub = app.add_subcommand(std::string(name));
    sub->add_option("--config", opt.config, "JSON config (// comments allowed) overlaid on the scenario");
    sub->add_option("--scenario", opt.scenario, "paper, ideal-fluorescence, improved-cavity or custom");
    sub->add_option("--seed", opt.seed, "RNG seed");
    sub->add_option("--trials", opt.trials, "Monte Carlo trials per preparation")->check(CLI::PositiveNumber);
    sub->add_option("--out", opt.out, "output file (default: standard output)");
    sub->callback([&command, name] { command = std::string(name); });
  }
  app.get_subcommand("bounds")->description("Helstrom and accessible-knowledge bounds versus photon number");
  app.get_subcommand("detect")->description("Monte Carlo and exact photon-counting detection error");
  app.get_subcommand("zeno")->description("Zeno-suppressed microwave transfer versus photon number");
  app.get_subcommand("depump")->description("Bright-state survival versus photon number");
  app.get_subcommand("lindblad")->description("Master-equation scattering budget");
  app.get_subcommand("figure4")->description("Knowledge versus scattered photons");
  app.get_subcommand("validate-config")->description("Check a config and print it fully resolved");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    return run(command, opt);
  } catch (const cavread::ConfigError& e) {
    std::cerr << "cavread: configuration error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const cavread::DomainError& e) {
    std::cerr << "cavread: invalid parameter: " << e.what() << '\n';
    return kExitUsage;
  } catch (const cavread::NumericalError& e) {
    std::cerr << "cavread: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "cavread: " << e.what() << '\n';
    return kExitNumerical;
  }
}
