#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cavread/commands.hpp"
#include "cavread/config.hpp"
#include "cavread/errors.hpp"

using namespace cavread;
namespace fs = std::filesystem;

namespace {

struct Csv {
  std::map<std::string, std::string> meta;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    FAIL("missing column " << name);
    return 0;
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

Csv parse_csv(const std::string& text) {
  Csv csv;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.rfind("# ", 0) == 0) {
      const auto colon = line.find(": ");
      csv.meta[line.substr(2, colon - 2)] = line.substr(colon + 2);
    } else if (csv.header.empty()) {
      csv.header = split(line);
    } else {
      std::vector<double> row;
      for (const auto& c : split(line)) row.push_back(std::stod(c));
      csv.rows.push_back(row);
    }
  }
  return csv;
}

std::string run(std::string_view command, const ScenarioConfig& cfg) {
  std::ostringstream out;
  run_command(command, cfg, out);
  return out.str();
}

// Independent closed forms.
double fln_oracle(double x) { return x + std::log1p(std::sqrt(-std::expm1(-x))); }
double helstrom_oracle(double q) { return 0.5 * (1.0 - std::sqrt(1.0 - q)); }

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("cavread_test_" + std::to_string(::getpid()))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path file(const std::string& name, const std::string& content) const {
    std::ofstream(path_ / name) << content;
    return path_ / name;
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

int cli(const std::string& args) {
  const std::string cmd = std::string(CAVREAD_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("every scenario round-trips through JSON") {
  for (auto name : kScenarioNames) {
    const auto cfg = scenario_defaults(name);
    const auto j = to_json(cfg);
    CHECK(to_json(config_from_json(j)) == j);
    CHECK(to_json(load_config(std::nullopt, std::string(name) == "custom" ? std::optional<std::string>{"paper"}
                                                                           : std::optional<std::string>{std::string(name)})) ==
          to_json(scenario_defaults(std::string(name) == "custom" ? "paper" : name)));
  }
}

TEST_CASE("the embedded scenario carries the experiment's numbers") {
  const auto cfg = scenario_defaults("paper");
  CHECK(cfg.cavity.g == 185.0);
  CHECK(cfg.counting.T1 == 0.0024);
  CHECK(cfg.detectors.reflection == 0.31);
  CHECK(cfg.depump.s_inf == 0.27);
  CHECK(cfg.atom.second_mode_detuning == 540.0);
  CHECK(cfg.photons_per_scatter() == doctest::Approx(142.0 * 3.0 / 3.6));
}

TEST_CASE("user files are overlaid strictly") {
  TempDir tmp;
  const auto good = tmp.file("good.json", "{\n  // comment\n  \"seed\": 9, \"cavity\": {\"g\": 150}\n}");
  const auto cfg = load_config(good);
  CHECK(cfg.seed == 9);
  CHECK(cfg.cavity.g == 150.0);
  CHECK(cfg.cavity.kappa == 53.0);

  CHECK_THROWS_AS(load_config(tmp.file("a.json", R"({"sed": 1})")), ConfigError);
  CHECK_THROWS_AS(load_config(tmp.file("b.json", R"({"cavity": {"gg": 1}})")), ConfigError);
  CHECK_THROWS_AS(load_config(tmp.file("c.json", R"({"cavity": {"g": "big"}})")), ConfigError);
  CHECK_THROWS_AS(load_config(tmp.file("d.json", R"({"cavity": 3})")), ConfigError);
  CHECK_THROWS_AS(load_config(tmp.file("e.json", "{ not json")), ConfigError);
  CHECK_THROWS_AS(load_config(tmp.file("f.json", R"({"cavity": {"kappa": -1}})")), ConfigError);
  CHECK_THROWS_AS(load_config(tmp.path() / "missing.json"), ConfigError);
  CHECK_THROWS_AS(load_config(std::nullopt, std::string("custom")), ConfigError);
  CHECK_THROWS_AS(load_config(std::nullopt, std::string("bogus")), ConfigError);

  const auto named = tmp.file("named.json", R"({"scenario": "ideal-fluorescence"})");
  CHECK(load_config(named).scenario == "ideal-fluorescence");
  CHECK(load_config(named, std::string("paper")).scenario == "paper");
  CHECK(load_config(tmp.file("custom.json", R"({"scenario": "custom"})")).scenario == "custom");
}

TEST_CASE("grids") {
  Grid g{1.0, 100.0, 3, true};
  const auto v = g.values();
  REQUIRE(v.size() == 4);
  CHECK(v[0] == 0.0);
  CHECK(v[1] == doctest::Approx(1.0));
  CHECK(v[2] == doctest::Approx(10.0));
  CHECK(v[3] == doctest::Approx(100.0));
  CHECK(Grid{0.0, 20.0, 41, false}.values().size() == 41);
  CHECK_THROWS_AS((Grid{0.0, 10.0, 5, true}.validate("g")), ConfigError);
  CHECK_THROWS_AS((Grid{5.0, 1.0, 5, false}.validate("g")), ConfigError);
}

TEST_CASE("bounds CSV") {
  const auto cfg = scenario_defaults("paper");
  const auto csv = parse_csv(run("bounds", cfg));
  CHECK(csv.meta.at("command") == "bounds");
  CHECK(csv.meta.at("scenario") == "paper");
  CHECK(csv.header == std::vector<std::string>{"n", "eps_H", "I_max", "I_accessible_model"});
  const double zeta = std::stod(csv.meta.at("zeta")), xi = std::stod(csv.meta.at("xi"));
  CHECK(zeta == doctest::Approx(0.612).epsilon(0.005 / 0.612));
  REQUIRE(csv.rows.size() == 32);
  CHECK(csv.rows[0] == std::vector<double>{0.0, 0.5, 0.0, 0.0});
  for (const auto& r : csv.rows) {
    CHECK(r[1] == doctest::Approx(helstrom_oracle(std::exp(-zeta * r[0]))).epsilon(1e-9));
    CHECK(r[2] == doctest::Approx(fln_oracle(zeta * r[0])).epsilon(1e-12));
    CHECK(r[3] == doctest::Approx(fln_oracle(xi * r[0])).epsilon(1e-12));
  }
  CHECK(parse_csv(run("bounds", scenario_defaults("ideal-fluorescence"))).meta.at("zeta") == "2");
}

TEST_CASE("detect CSV") {
  auto cfg = scenario_defaults("paper");
  cfg.trials = 2000;
  cfg.detect_points = {0.0, 20.0};
  const auto text = run("detect", cfg);
  const auto csv = parse_csv(text);
  CHECK(csv.header == std::vector<std::string>{"n", "eps_mc", "ci", "eps_exact", "eps_mc_jumps"});
  REQUIRE(csv.rows.size() == 2);
  CHECK(csv.rows[0][csv.col("eps_exact")] == 0.5);
  CHECK(csv.meta.at("trials") == "2000");
  CHECK(run("detect", cfg) == text);
  cfg.seed = 2;
  CHECK(run("detect", cfg) != text);
}

TEST_CASE("zeno CSV") {
  const auto cfg = scenario_defaults("paper");
  const auto csv = parse_csv(run("zeno", cfg));
  CHECK(csv.header == std::vector<std::string>{"n", "p_obs_model_state1", "p_obs_model_state0", "n_tilde"});
  REQUIRE(csv.rows.size() == 41);
  CHECK(csv.rows[0][1] == doctest::Approx(0.95));
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    const auto& r = csv.rows[i];
    CHECK(r[1] >= 0.02);
    CHECK(r[1] <= 0.95);
    CHECK(std::abs(r[3] - 0.37 * r[0]) < 1e-5);
    if (i > 0) CHECK(r[1] < csv.rows[i - 1][1]);
  }
}

TEST_CASE("depump CSV") {
  const auto cfg = scenario_defaults("paper");
  const auto csv = parse_csv(run("depump", cfg));
  CHECK(csv.header == std::vector<std::string>{"n", "S_model"});
  CHECK(std::stod(csv.meta.at("photons_per_scatter")) == doctest::Approx(118.33).epsilon(1e-3));
  const double lambda = (1.0 / 142.0) / 0.73;
  for (const auto& r : csv.rows) CHECK(r[1] == doctest::Approx(0.27 + 0.73 * std::exp(-lambda * r[0])).epsilon(1e-12));
  CHECK(csv.rows.front()[1] == 1.0);
}

TEST_CASE("figure4 CSV") {
  const auto cfg = scenario_defaults("paper");
  const auto csv = parse_csv(run("figure4", cfg));
  CHECK(csv.header ==
        std::vector<std::string>{"m", "free_space_bound", "I_max_cavity", "I_acc_perfect_detectors", "I_acc_experiment"});
  const double per_scatter = 142.0 * 3.0 / 3.6;
  CHECK(csv.rows.front() == std::vector<double>{0, 0, 0, 0, 0});
  for (const auto& r : csv.rows) {
    CHECK(r[1] == doctest::Approx(fln_oracle(2.0 * r[0])).epsilon(1e-12));
    CHECK(r[2] == doctest::Approx(fln_oracle(0.74 * per_scatter * r[0])).epsilon(1e-12));
    CHECK(r[3] == doctest::Approx(fln_oracle(0.11 * per_scatter * r[0])).epsilon(1e-12));
    CHECK(r[4] == doctest::Approx(fln_oracle(0.046 * per_scatter * r[0])).epsilon(1e-12));
  }
  // The experiment beats ideal fluorescence by 5.44/2 in the exponent.
  const auto& last = csv.rows.back();
  CHECK((last[4] - std::log(2.0)) / (last[1] - std::log(2.0)) == doctest::Approx(2.72).epsilon(0.01));

  const auto improved = parse_csv(run("figure4", scenario_defaults("improved-cavity")));
  CHECK(std::stod(improved.meta.at("photons_per_scatter")) > per_scatter);
}

TEST_CASE("lindblad CSV") {
  const auto csv = parse_csv([] {
    std::string text = run("lindblad", scenario_defaults("paper"));
    // Quantity rows carry a name in the first column; keep only the value.
    std::string out;
    std::stringstream ss(text);
    std::string line;
    bool header = false;
    while (std::getline(ss, line)) {
      if (line.rfind("# ", 0) == 0 || !header) {
        header = header || line.rfind("# ", 0) != 0;
        out += line + "\n";
        continue;
      }
      out += line.substr(line.find(',') + 1) + "\n";
    }
    return out;
  }());
  CHECK(csv.header == std::vector<std::string>{"quantity", "value"});
  REQUIRE(csv.rows.size() == 14);
  CHECK(csv.rows[0][0] == doctest::Approx(cooperativity(CavityParams{})));
  CHECK(csv.rows[1][0] == 48.0);
  CHECK(csv.rows[2][0] == doctest::Approx(csv.rows[3][0]).epsilon(0.05));
}

TEST_CASE("validate-config prints the resolved configuration") {
  const auto cfg = scenario_defaults("improved-cavity");
  const auto j = nlohmann::json::parse(run("validate-config", cfg));
  CHECK(j == to_json(cfg));
  CHECK_THROWS_AS(run("plot", cfg), ConfigError);
}

TEST_CASE("command-line exit codes and outputs") {
  TempDir tmp;
  CHECK(cli("--help") == 0);
  CHECK(cli("bounds") == 0);
  CHECK(cli("") == 1);
  CHECK(cli("plot") == 1);
  CHECK(cli("detect --trials 0") == 1);
  CHECK(cli("bounds --scenario bogus") == 1);
  CHECK(cli("bounds --config " + tmp.file("bad.json", R"({"cavity": {"gg": 1}})").string()) == 1);
  CHECK(cli("bounds --config " + (tmp.path() / "absent.json").string()) == 1);

  // An observed transfer this close to the floor needs n_tilde beyond the model range.
  const auto far = tmp.file("far.json", R"({"grids": {"zeno": {"max": 1e7}}})");
  const auto out = tmp.path() / "zeno.csv";
  CHECK(cli("zeno --config " + far.string() + " --out " + out.string()) == 2);
  CHECK_FALSE(fs::exists(out));
  CHECK_FALSE(fs::exists(out.string() + ".partial"));

  const auto ok = tmp.path() / "bounds.csv";
  CHECK(cli("bounds --seed 4 --out " + ok.string()) == 0);
  std::ifstream in(ok);
  std::stringstream text;
  text << in.rdbuf();
  auto cfg = scenario_defaults("paper");
  cfg.seed = 4;
  cfg.output = ok.string();
  CHECK(text.str() == run("bounds", cfg));
}
