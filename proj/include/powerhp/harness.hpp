#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "powerhp/attack.hpp"
#include "powerhp/objectives.hpp"
#include "powerhp/optimizers.hpp"

namespace powerhp {

// One benchmark experiment: a method applied to an objective for a number
// of independent trials. Trial i derives its RNG stream and (unless
// pinned) its start point from split(master_seed, i), so results are
// reproducible regardless of thread count or execution order.
struct ExperimentConfig {
  std::string label;  // filename-friendly identifier for outputs
  BenchmarkSpec objective;
  std::string method;  // gs_powerhp | gs_poweropt | zosgd | slgh_plain |
                       // double_loop
  PowerHPConfig optimizer;
  std::optional<Vector> mu0;  // pinned start; absent -> uniform box draw
  double mu0_box_lo = -3.0;
  double mu0_box_hi = 3.0;
  int outer_steps = 0;  // double_loop only
  int inner_T = 0;
  int trials = 100;
  std::uint64_t master_seed = 1;
  int threads = 0;  // 0 -> all available cores

  void validate() const;
};

ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

struct TrialRow {
  int trial = 0;
  bool aborted = false;
  double f_best = 0.0;
  double mse = 0.0;  // NaN when no known maximizer or aborted
  int t_star = 0;
  std::int64_t queries = 0;
  TrialRecord record;
};

struct AggregateStats {
  int trials = 0;
  int aborted = 0;  // aborted trials are excluded from the means below
  double mean_f_best = 0.0, std_f_best = 0.0;
  std::optional<double> mean_mse, std_mse;
  double mean_t_star = 0.0, std_t_star = 0.0;
  double mean_queries = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<TrialRow> rows;  // ordered by trial index
  AggregateStats stats;
};

// Re-runs trial `index` of the experiment from scratch; the parallel
// runner produces exactly this row.
TrialRow run_single_trial(const ExperimentConfig& config, int index);

ExperimentResult run_experiment(const ExperimentConfig& config);

// Aggregation folds rows in trial order, so the statistics are identical
// no matter how the rows are permuted on input.
AggregateStats aggregate(const ExperimentConfig& config,
                         std::vector<TrialRow> rows);

// Header: trial,f_best,mse,t_star,queries
std::string trials_csv(const ExperimentResult& result);
std::string aggregate_json(const ExperimentResult& result);

// Writes <label>.trials.csv and <label>.aggregate.json into out_dir.
void write_experiment_outputs(const ExperimentResult& result,
                              const std::string& out_dir);

struct SweepRow {
  std::string label;
  std::string objective;
  std::string method;
  AggregateStats stats;
};

// Runs every config and returns rows sorted by mean MSE ascending
// (configs without a known maximizer sort last).
std::vector<SweepRow> run_sweep(const std::vector<ExperimentConfig>& configs);
std::string sweep_csv(const std::vector<SweepRow>& rows);

AttackSuiteConfig parse_attack_config(const std::string& json_text);
AttackSuiteConfig load_attack_config(const std::string& path);
std::string attack_report_json(const AttackSuiteOutcome& outcome);

}  // namespace powerhp
