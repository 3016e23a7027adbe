// Command-line front end: benchmark runs, hyperparameter sweeps, surrogate
// landscape emission, stationary-point checks, the toy attack suite, and
// theory constants.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "powerhp/analysis.hpp"
#include "powerhp/errors.hpp"
#include "powerhp/harness.hpp"
#include "powerhp/objectives.hpp"

namespace {

using namespace powerhp;
using nlohmann::json;

struct CommonOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> threads;
  std::string out_dir = "out";
};

void add_common(CLI::App* cmd, CommonOverrides& common) {
  cmd->add_option("--seed", common.seed, "Override the master seed");
  cmd->add_option("--trials", common.trials, "Override the trial count");
  cmd->add_option("--threads", common.threads,
                  "Worker threads (0 = all cores)");
  cmd->add_option("--out", common.out_dir, "Output directory")
      ->capture_default_str();
}

void apply(const CommonOverrides& common, ExperimentConfig& cfg) {
  if (common.seed) cfg.master_seed = *common.seed;
  if (common.trials) cfg.trials = *common.trials;
  if (common.threads) cfg.threads = *common.threads;
}

ScalarFn1D named_scalar_fn(const std::string& name, Objective& storage) {
  BenchmarkSpec spec;
  spec.name = name;
  spec.dim = 1;
  storage = make_objective(spec);
  return as_scalar_fn(storage);
}

QuadratureSpec rule_spec(const std::string& rule) {
  QuadratureSpec spec;
  if (rule == "trapezoid") {
    spec.rule = QuadratureRule::trapezoid;
    spec.nodes = 256;
  } else if (rule != "gauss_hermite") {
    throw ConfigError("unknown quadrature rule '" + rule + "'");
  }
  return spec;
}

void write_file(const std::string& dir, const std::string& name,
                const std::string& body) {
  std::filesystem::create_directories(dir);
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << body;
  std::cerr << "wrote " << path.string() << "\n";
}

int cmd_bench(const std::string& config_path, const CommonOverrides& common) {
  ExperimentConfig cfg = load_experiment_config(config_path);
  apply(common, cfg);
  const ExperimentResult result = run_experiment(cfg);
  write_experiment_outputs(result, common.out_dir);
  std::cout << aggregate_json(result);
  return 0;
}

int cmd_sweep(const std::string& config_dir, const CommonOverrides& common) {
  namespace fs = std::filesystem;
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(config_dir))
    if (entry.path().extension() == ".json") paths.push_back(entry.path());
  std::sort(paths.begin(), paths.end());
  if (paths.empty())
    throw ConfigError("no .json configs in '" + config_dir + "'");

  std::vector<ExperimentConfig> configs;
  for (const auto& p : paths) {
    ExperimentConfig cfg = load_experiment_config(p.string());
    apply(common, cfg);
    configs.push_back(std::move(cfg));
  }
  const std::vector<SweepRow> rows = run_sweep(configs);
  const std::string csv = sweep_csv(rows);
  write_file(common.out_dir, "sweep.csv", csv);
  std::cout << csv;
  return 0;
}

int cmd_attack(const std::string& config_path, const CommonOverrides& common) {
  AttackSuiteConfig cfg = load_attack_config(config_path);
  if (common.seed) cfg.master_seed = *common.seed;
  if (common.trials) cfg.instances = *common.trials;
  const AttackSuiteOutcome outcome = run_attack_suite(cfg);
  const std::string report = attack_report_json(outcome);
  write_file(common.out_dir, "attack_report.json", report);
  std::cout << report;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Zeroth-order optimization benchmarks: power-transformed Gaussian "
      "smoothing with a decaying-radius schedule, ablations, and analysis "
      "oracles"};
  app.require_subcommand(1);

  CommonOverrides common;

  std::string bench_config;
  CLI::App* bench = app.add_subcommand(
      "bench", "Run one experiment config; writes trial CSV + aggregate JSON");
  bench->add_option("config", bench_config, "Experiment JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  add_common(bench, common);

  std::string sweep_dir;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Run every config in a directory, rank by mean MSE");
  sweep->add_option("config-dir", sweep_dir, "Directory of experiment JSONs")
      ->required()
      ->check(CLI::ExistingDirectory);
  add_common(sweep, common);

  std::string land_objective = "two_log";
  double land_N = 1.0;
  std::vector<double> land_sigmas{0.1, 0.5, 1.0, 2.0};
  double mu_from = -3.0, mu_to = 3.0, mu_step = 0.05;
  std::string land_rule = "trapezoid";
  CLI::App* landscape = app.add_subcommand(
      "landscape", "Emit smoothed-surrogate curves F and dF as CSV");
  landscape->add_option("--objective", land_objective, "1D objective name")
      ->capture_default_str();
  landscape->add_option("--N", land_N, "Power-transform exponent")
      ->capture_default_str();
  landscape->add_option("--sigmas", land_sigmas, "Smoothing radii")
      ->capture_default_str();
  landscape->add_option("--mu-from", mu_from, "Grid start")
      ->capture_default_str();
  landscape->add_option("--mu-to", mu_to, "Grid end")->capture_default_str();
  landscape->add_option("--mu-step", mu_step, "Grid step")
      ->capture_default_str();
  landscape->add_option("--rule", land_rule, "gauss_hermite | trapezoid")
      ->capture_default_str();
  landscape->add_option("--out", common.out_dir, "Output directory")
      ->capture_default_str();

  std::string stat_objective = "two_log";
  double stat_sigma = 1.0, stat_delta = 0.1, stat_M = 3.0, stat_step = 0.1;
  double stat_x_star = -0.5, stat_N_start = 0.01;
  std::string stat_rule = "trapezoid";
  CLI::App* stationary = app.add_subcommand(
      "stationary",
      "Find the smallest power N whose surrogate gradient points at the "
      "global maximizer everywhere off a delta-box");
  stationary->add_option("--objective", stat_objective, "1D objective name")
      ->capture_default_str();
  stationary->add_option("--x-star", stat_x_star, "Known maximizer")
      ->capture_default_str();
  stationary->add_option("--sigma", stat_sigma)->capture_default_str();
  stationary->add_option("--delta", stat_delta)->capture_default_str();
  stationary->add_option("--M", stat_M, "Grid half-width")
      ->capture_default_str();
  stationary->add_option("--grid-step", stat_step)->capture_default_str();
  stationary->add_option("--N-start", stat_N_start, "Search floor")
      ->capture_default_str();
  stationary->add_option("--rule", stat_rule, "gauss_hermite | trapezoid")
      ->capture_default_str();

  std::string attack_config;
  CLI::App* attack = app.add_subcommand(
      "attack", "Run the targeted-attack suite against the toy classifier");
  attack->add_option("config", attack_config, "Attack JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  add_common(attack, common);

  int c_d = 1;
  double c_sigma = 1.0, c_N = 1.0, c_f_star = 0.0, c_L_f = 1.0;
  double c_b = 0.1, c_gamma = 0.25, c_eps = 0.01, c_F0 = 0.0;
  CLI::App* constants = app.add_subcommand(
      "constants", "Print smoothness constants and the iteration bound");
  constants->add_option("--d", c_d)->capture_default_str();
  constants->add_option("--sigma", c_sigma)->capture_default_str();
  constants->add_option("--N", c_N)->capture_default_str();
  constants->add_option("--f-star", c_f_star)->capture_default_str();
  constants->add_option("--L-f", c_L_f)->capture_default_str();
  constants->add_option("--b", c_b)->capture_default_str();
  constants->add_option("--gamma", c_gamma)->capture_default_str();
  constants->add_option("--eps", c_eps)->capture_default_str();
  constants->add_option("--F0", c_F0)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (bench->parsed()) return cmd_bench(bench_config, common);
    if (sweep->parsed()) return cmd_sweep(sweep_dir, common);
    if (attack->parsed()) return cmd_attack(attack_config, common);

    if (landscape->parsed()) {
      Objective storage("placeholder", 1, [](const Vector&) { return 0.0; });
      const ScalarFn1D f = named_scalar_fn(land_objective, storage);
      std::vector<double> grid;
      for (double mu = mu_from; mu <= mu_to + 0.5 * mu_step; mu += mu_step)
        grid.push_back(mu);
      const auto rows =
          landscape_curves(f, land_N, land_sigmas, grid, rule_spec(land_rule));
      std::ostringstream csv;
      write_landscape_csv(csv, rows);
      write_file(common.out_dir, "landscape.csv", csv.str());
      return 0;
    }

    if (stationary->parsed()) {
      Objective storage("placeholder", 1, [](const Vector&) { return 0.0; });
      const ScalarFn1D f = named_scalar_fn(stat_objective, storage);
      const PowerSearchResult result =
          find_minimal_power(f, stat_x_star, stat_sigma, stat_delta, stat_M,
                             stat_step, stat_N_start, 1e6, 0.01,
                             rule_spec(stat_rule));
      json j;
      j["objective"] = stat_objective;
      j["sigma"] = stat_sigma;
      j["delta"] = stat_delta;
      j["M"] = stat_M;
      j["minimal_N"] = result.minimal_N;
      json ladder = json::array();
      for (const SignConditionReport& r : result.ladder)
        ladder.push_back({{"N", r.N},
                          {"fraction", r.fraction},
                          {"checked", r.points_checked}});
      j["ladder"] = ladder;
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (constants->parsed()) {
      const TheoryConstants tc = theory_constants(
          c_d, c_sigma, c_N, c_f_star, c_L_f, c_b, c_gamma, c_eps, c_F0);
      json j;
      j["L"] = tc.L;
      j["G"] = tc.G;
      j["zeta_tail"] = tc.zeta_tail;
      j["c0"] = tc.c0;
      j["c1"] = tc.c1;
      j["c2"] = tc.c2;
      j["t_bound"] = tc.t_bound;
      j["dim_sq_variant"] = {{"c0", tc.c0_dim_sq},
                             {"c1", tc.c1_dim_sq},
                             {"c2", tc.c2_dim_sq},
                             {"t_bound", tc.t_bound_dim_sq}};
      std::cout << j.dump(2) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
