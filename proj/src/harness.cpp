#include "powerhp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "powerhp/errors.hpp"
#include "powerhp/rng.hpp"

namespace powerhp {

namespace {

using nlohmann::json;

constexpr const char* kMethods[] = {"gs_powerhp", "gs_poweropt", "zosgd",
                                    "slgh_plain", "double_loop"};

bool known_method(const std::string& m) {
  for (const char* k : kMethods)
    if (m == k) return true;
  return false;
}

bool powered_method(const std::string& m) {
  return m == "gs_powerhp" || m == "gs_poweropt";
}

Vector vector_from_json(const json& j) {
  if (!j.is_array() || j.empty())
    throw ConfigError("expected a non-empty number array");
  std::vector<double> v;
  for (const auto& e : j) v.push_back(e.get<double>());
  return Vector(std::move(v));
}

SigmaSchedule sigma_from_json(const json& j, int T) {
  const std::string kind = j.value("kind", "fixed");
  if (kind == "fixed") {
    if (!j.contains("sigma")) throw ConfigError("sigma: 'sigma' required");
    return SigmaSchedule::fixed(j.at("sigma").get<double>());
  }
  if (kind == "geometric_decay") {
    const double sigma0 = j.at("sigma0").get<double>();
    const double b = j.value("b", 0.0);
    double beta;
    if (j.contains("beta")) {
      beta = j.at("beta").get<double>();
    } else if (j.contains("sigma_T")) {
      // Solve sigma0 * beta^T + b = sigma_T for beta.
      const double target = j.at("sigma_T").get<double>() - b;
      if (target <= 0.0 || target >= sigma0)
        throw ConfigError("sigma: sigma_T must lie in (b, sigma0 + b)");
      beta = std::pow(target / sigma0, 1.0 / static_cast<double>(T));
    } else {
      throw ConfigError("sigma: geometric_decay needs 'beta' or 'sigma_T'");
    }
    return SigmaSchedule::geometric(sigma0, b, beta);
  }
  throw ConfigError("sigma: unknown kind '" + kind + "'");
}

LearningRateSchedule lr_from_json(const json& j) {
  const std::string kind = j.value("kind", "constant");
  if (kind == "constant")
    return LearningRateSchedule::constant(j.at("alpha").get<double>());
  if (kind == "polynomial")
    return LearningRateSchedule::polynomial(j.at("gamma").get<double>());
  throw ConfigError("lr: unknown kind '" + kind + "'");
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;

  const json& obj = j.at("objective");
  cfg.objective.name = obj.at("name").get<std::string>();
  cfg.objective.dim = obj.at("dim").get<int>();
  if (obj.contains("m1")) cfg.objective.m1 = vector_from_json(obj.at("m1"));
  if (obj.contains("m2")) cfg.objective.m2 = vector_from_json(obj.at("m2"));

  cfg.method = j.at("method").get<std::string>();
  if (!known_method(cfg.method))
    throw ConfigError("unknown method '" + cfg.method + "'");

  const json& opt = j.at("optimizer");
  cfg.optimizer.T = opt.value("T", 1000);
  cfg.optimizer.K = opt.value("K", 10);
  if (opt.contains("N")) cfg.optimizer.N = opt.at("N").get<double>();
  cfg.optimizer.sigma_schedule =
      sigma_from_json(opt.at("sigma"), cfg.optimizer.T);
  cfg.optimizer.lr_schedule = lr_from_json(opt.at("lr"));
  cfg.optimizer.normalize_update =
      opt.value("normalize_update", powered_method(cfg.method));
  const std::string shift =
      opt.value("shift_mode", std::string("subtract_reference"));
  if (shift == "none")
    cfg.optimizer.shift_mode = ShiftMode::none;
  else if (shift == "subtract_reference")
    cfg.optimizer.shift_mode = ShiftMode::subtract_reference;
  else
    throw ConfigError("optimizer: unknown shift_mode '" + shift + "'");
  cfg.optimizer.digest_stride = opt.value("digest_stride", 0);

  if (j.contains("mu0") && !j.at("mu0").is_null())
    cfg.mu0 = vector_from_json(j.at("mu0"));
  if (j.contains("mu0_box")) {
    const json& box = j.at("mu0_box");
    if (!box.is_array() || box.size() != 2)
      throw ConfigError("mu0_box must be [lo, hi]");
    cfg.mu0_box_lo = box[0].get<double>();
    cfg.mu0_box_hi = box[1].get<double>();
  }

  if (j.contains("double_loop")) {
    cfg.outer_steps = j.at("double_loop").at("outer_steps").get<int>();
    cfg.inner_T = j.at("double_loop").at("inner_T").get<int>();
  }

  cfg.trials = j.value("trials", 100);
  cfg.master_seed = j.value("master_seed", std::uint64_t{1});
  cfg.threads = j.value("threads", 0);
  cfg.label = j.value("label",
                      cfg.objective.name + "_" + cfg.method);
  cfg.validate();
  return cfg;
}

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

struct Moments {
  double mean = 0.0;
  double stdev = 0.0;
};

Moments moments(const std::vector<double>& xs) {
  Moments m;
  if (xs.empty()) return m;
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double acc = 0.0;
    for (double x : xs) acc += (x - m.mean) * (x - m.mean);
    m.stdev = std::sqrt(acc / static_cast<double>(xs.size() - 1));
  }
  return m;
}

void append_number(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

TrialRecord dispatch(const ExperimentConfig& cfg, Objective& objective,
                     const PowerHPConfig& opt) {
  if (cfg.method == "gs_powerhp") return run_gs_powerhp(objective, opt);
  if (cfg.method == "gs_poweropt") return run_gs_poweropt(objective, opt);
  if (cfg.method == "zosgd") return run_zosgd(objective, opt);
  if (cfg.method == "slgh_plain") return run_slgh_plain(objective, opt);
  return run_double_loop_homotopy(objective, opt, cfg.outer_steps,
                                  cfg.inner_T);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!known_method(method))
    throw ConfigError("unknown method '" + method + "'");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (threads < 0) throw ConfigError("threads must be >= 0");
  if (method == "double_loop" && (outer_steps < 1 || inner_T < 1))
    throw ConfigError("double_loop needs outer_steps and inner_T");
  if (!mu0 && mu0_box_lo >= mu0_box_hi)
    throw ConfigError("mu0_box must satisfy lo < hi");
  if (powered_method(method) && !optimizer.N)
    throw ConfigError(method + " requires optimizer.N");
  if (!powered_method(method) && optimizer.N)
    throw ConfigError(method + " must not set optimizer.N");
  if (mu0 && mu0->dim() != static_cast<std::size_t>(objective.dim))
    throw ConfigError("pinned mu0 dimension does not match the objective");
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str());
}

TrialRow run_single_trial(const ExperimentConfig& config, int index) {
  config.validate();
  Objective objective = make_objective(config.objective);

  SeededRng trial_rng =
      SeededRng(config.master_seed).split(static_cast<std::uint64_t>(index));

  PowerHPConfig opt = config.optimizer;
  if (config.mu0) {
    opt.mu0 = *config.mu0;
  } else {
    std::vector<double> start(static_cast<std::size_t>(config.objective.dim));
    for (double& v : start)
      v = config.mu0_box_lo +
          (config.mu0_box_hi - config.mu0_box_lo) * trial_rng.uniform();
    opt.mu0 = Vector(std::move(start));
  }
  opt.seed = trial_rng.next_u64();

  TrialRow row;
  row.trial = index;
  row.record = dispatch(config, objective, opt);
  row.aborted = row.record.aborted;
  row.queries = row.record.queries;
  if (row.aborted) {
    row.f_best = nan_value();
    row.mse = nan_value();
    row.t_star = 0;
    return row;
  }
  row.f_best = row.record.best_f;
  row.t_star = row.record.t_star;
  const auto& x_star = objective.known_maximizer();
  row.mse = x_star ? mse(row.record.best_mu, *x_star) : nan_value();
  return row;
}

AggregateStats aggregate(const ExperimentConfig& config,
                         std::vector<TrialRow> rows) {
  std::sort(rows.begin(), rows.end(),
            [](const TrialRow& a, const TrialRow& b) {
              return a.trial < b.trial;
            });
  AggregateStats stats;
  stats.trials = static_cast<int>(rows.size());

  std::vector<double> f, m, t, q;
  bool have_mse = true;
  for (const TrialRow& row : rows) {
    if (row.aborted) {
      ++stats.aborted;
      continue;
    }
    f.push_back(row.f_best);
    t.push_back(static_cast<double>(row.t_star));
    q.push_back(static_cast<double>(row.queries));
    if (std::isnan(row.mse))
      have_mse = false;
    else
      m.push_back(row.mse);
  }
  const Moments mf = moments(f);
  stats.mean_f_best = mf.mean;
  stats.std_f_best = mf.stdev;
  const Moments mt = moments(t);
  stats.mean_t_star = mt.mean;
  stats.std_t_star = mt.stdev;
  stats.mean_queries = moments(q).mean;
  if (have_mse && !m.empty()) {
    const Moments mm = moments(m);
    stats.mean_mse = mm.mean;
    stats.std_mse = mm.stdev;
  }
  (void)config;
  return stats;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();

  int workers = config.threads;
  if (workers <= 0) {
    const unsigned hc = std::thread::hardware_concurrency();
    workers = hc == 0 ? 1 : static_cast<int>(hc);
  }
  workers = std::min(workers, config.trials);

  std::vector<TrialRow> rows(static_cast<std::size_t>(config.trials));
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;

  auto work = [&]() {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= config.trials || failed.load()) break;
      try {
        rows[static_cast<std::size_t>(i)] = run_single_trial(config, i);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        failed.store(true);
        if (failure.empty()) failure = e.what();
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& th : pool) th.join();
  }
  if (failed.load()) throw ConfigError("experiment failed: " + failure);

  ExperimentResult result;
  result.config = config;
  result.stats = aggregate(config, rows);
  result.rows = std::move(rows);
  return result;
}

std::string trials_csv(const ExperimentResult& result) {
  std::string out = "trial,f_best,mse,t_star,queries\n";
  for (const TrialRow& row : result.rows) {
    out += std::to_string(row.trial);
    out += ',';
    append_number(out, row.f_best);
    out += ',';
    append_number(out, row.mse);
    out += ',';
    out += std::to_string(row.t_star);
    out += ',';
    out += std::to_string(row.queries);
    out += '\n';
  }
  return out;
}

std::string aggregate_json(const ExperimentResult& result) {
  const ExperimentConfig& cfg = result.config;
  json j;
  j["label"] = cfg.label;
  j["objective"] = {{"name", cfg.objective.name}, {"dim", cfg.objective.dim}};
  j["method"] = cfg.method;
  j["trials"] = result.stats.trials;
  j["aborted"] = result.stats.aborted;
  j["master_seed"] = cfg.master_seed;

  json opt;
  if (cfg.optimizer.N) opt["N"] = *cfg.optimizer.N;
  opt["K"] = cfg.optimizer.K;
  opt["T"] = cfg.optimizer.T;
  opt["normalize_update"] = cfg.optimizer.normalize_update;
  const SigmaSchedule& ss = cfg.optimizer.sigma_schedule;
  if (ss.kind == SigmaSchedule::Kind::fixed) {
    opt["sigma"] = {{"kind", "fixed"}, {"sigma", ss.sigma0}};
  } else {
    opt["sigma"] = {{"kind", "geometric_decay"},
                    {"sigma0", ss.sigma0},
                    {"b", ss.b},
                    {"beta", ss.beta}};
  }
  const LearningRateSchedule& lr = cfg.optimizer.lr_schedule;
  if (lr.kind == LearningRateSchedule::Kind::constant)
    opt["lr"] = {{"kind", "constant"}, {"alpha", lr.alpha}};
  else
    opt["lr"] = {{"kind", "polynomial"}, {"gamma", lr.gamma}};
  j["optimizer"] = opt;
  if (cfg.method == "double_loop")
    j["double_loop"] = {{"outer_steps", cfg.outer_steps},
                        {"inner_T", cfg.inner_T}};

  json stats;
  stats["mean_f_best"] = result.stats.mean_f_best;
  stats["std_f_best"] = result.stats.std_f_best;
  if (result.stats.mean_mse) {
    stats["mean_mse"] = *result.stats.mean_mse;
    stats["std_mse"] = *result.stats.std_mse;
  } else {
    stats["mean_mse"] = nullptr;
    stats["std_mse"] = nullptr;
  }
  stats["mean_t_star"] = result.stats.mean_t_star;
  stats["std_t_star"] = result.stats.std_t_star;
  stats["mean_queries"] = result.stats.mean_queries;
  j["stats"] = stats;

  json aborted_trials = json::array();
  for (const TrialRow& row : result.rows)
    if (row.aborted)
      aborted_trials.push_back(
          {{"trial", row.trial}, {"reason", row.record.abort_reason}});
  j["aborted_trials"] = aborted_trials;
  return j.dump(2) + "\n";
}

void write_experiment_outputs(const ExperimentResult& result,
                              const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const fs::path base = fs::path(out_dir) / result.config.label;
  {
    std::ofstream csv(base.string() + ".trials.csv", std::ios::binary);
    if (!csv) throw ConfigError("cannot write to '" + out_dir + "'");
    csv << trials_csv(result);
  }
  {
    std::ofstream js(base.string() + ".aggregate.json", std::ios::binary);
    js << aggregate_json(result);
  }
}

std::vector<SweepRow> run_sweep(const std::vector<ExperimentConfig>& configs) {
  if (configs.empty()) throw ConfigError("sweep: no configs");
  std::vector<SweepRow> rows;
  rows.reserve(configs.size());
  for (const ExperimentConfig& cfg : configs) {
    const ExperimentResult result = run_experiment(cfg);
    rows.push_back(
        {cfg.label, cfg.objective.name, cfg.method, result.stats});
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SweepRow& a, const SweepRow& b) {
                     const double ma = a.stats.mean_mse.value_or(
                         std::numeric_limits<double>::infinity());
                     const double mb = b.stats.mean_mse.value_or(
                         std::numeric_limits<double>::infinity());
                     return ma < mb;
                   });
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "label,objective,method,trials,aborted,mean_f_best,std_f_best,"
      "mean_mse,std_mse,mean_t_star,mean_queries\n";
  for (const SweepRow& r : rows) {
    out += r.label + ',' + r.objective + ',' + r.method + ',';
    out += std::to_string(r.stats.trials) + ',';
    out += std::to_string(r.stats.aborted) + ',';
    append_number(out, r.stats.mean_f_best);
    out += ',';
    append_number(out, r.stats.std_f_best);
    out += ',';
    append_number(out, r.stats.mean_mse.value_or(nan_value()));
    out += ',';
    append_number(out, r.stats.std_mse.value_or(nan_value()));
    out += ',';
    append_number(out, r.stats.mean_t_star);
    out += ',';
    append_number(out, r.stats.mean_queries);
    out += '\n';
  }
  return out;
}

AttackSuiteConfig parse_attack_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("attack config parse error: ") + e.what());
  }
  try {
    AttackSuiteConfig cfg;
    cfg.classifier_seed = j.value("classifier_seed", std::uint64_t{7});
    cfg.instances = j.value("instances", 20);
    cfg.kappa = j.value("kappa", 0.001);
    cfg.lambda = j.value("lambda", 0.01);
    cfg.master_seed = j.value("master_seed", std::uint64_t{1});

    const json& opt = j.at("optimizer");
    cfg.optimizer.T = opt.value("T", 500);
    cfg.optimizer.K = opt.value("K", 10);
    cfg.optimizer.N = opt.at("N").get<double>();
    cfg.optimizer.sigma_schedule =
        sigma_from_json(opt.at("sigma"), cfg.optimizer.T);
    cfg.optimizer.lr_schedule = lr_from_json(opt.at("lr"));
    cfg.optimizer.normalize_update = opt.value("normalize_update", true);
    // mu0 placeholder; the suite replaces it with the zero vector.
    cfg.optimizer.mu0 = Vector::zeros(1);
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("attack config field error: ") + e.what());
  }
}

AttackSuiteConfig load_attack_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_attack_config(buf.str());
}

std::string attack_report_json(const AttackSuiteOutcome& outcome) {
  json j;
  j["classifier_accuracy"] = outcome.classifier_accuracy;
  json instances = json::array();
  for (const AttackInstanceResult& r : outcome.results) {
    instances.push_back({{"instance_id", r.instance_id},
                         {"success", r.success},
                         {"best_norm", r.best_norm},
                         {"t_star", r.t_star},
                         {"queries", r.queries},
                         {"r2", r.r2}});
  }
  j["instances"] = instances;

  json s;
  s["instances"] = outcome.summary.instances;
  s["successes"] = outcome.summary.successes;
  s["success_rate"] = outcome.summary.success_rate;
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v)
      s[key] = *v;
    else
      s[key] = nullptr;
  };
  put("mean_r2", outcome.summary.mean_r2);
  put("std_r2", outcome.summary.std_r2);
  put("mean_norm", outcome.summary.mean_norm);
  put("std_norm", outcome.summary.std_norm);
  put("mean_t_star", outcome.summary.mean_t_star);
  put("std_t_star", outcome.summary.std_t_star);
  j["summary"] = s;
  return j.dump(2) + "\n";
}

}  // namespace powerhp
