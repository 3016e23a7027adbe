// End-to-end acceptance checks for the optimizer library and benchmark
// harness. Each criterion prints exactly one PASS/FAIL line with its key
// numbers; the process exit code is the number of failures.
//
// Usage: powerhp_acceptance [--only <n>]

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "powerhp/analysis.hpp"
#include "powerhp/attack.hpp"
#include "powerhp/errors.hpp"
#include "powerhp/estimator.hpp"
#include "powerhp/harness.hpp"
#include "powerhp/objectives.hpp"
#include "powerhp/optimizers.hpp"

namespace {

using namespace powerhp;

constexpr double kInf = std::numeric_limits<double>::infinity();

QuadratureSpec trapezoid_spec() {
  QuadratureSpec spec;
  spec.rule = QuadratureRule::trapezoid;
  spec.nodes = 256;
  return spec;
}

// ---------------------------------------------------------------------
// 1. The sampled gradient estimate matches the quadrature gradient of the
//    smoothed surrogate within Monte Carlo error.

// Closed form of E[(x - mu)^2 exp(2N f(x))] for f(x) = -x^2 under
// x ~ N(mu, sigma^2); gives the exact per-sample variance for the
// standard-error bound below.
double sphere_weighted_second_moment(double mu, double sigma, double N) {
  const double a = 2.0 * N;
  const double q = 1.0 + 2.0 * a * sigma * sigma;
  const double z = std::exp(-a * mu * mu / q) / std::sqrt(q);
  const double s2 = sigma * sigma / q;
  const double dm = 2.0 * a * sigma * sigma * mu / q;
  return z * (s2 + dm * dm);
}

bool criterion_estimator(std::ostringstream& detail) {
  Objective sphere = make_objective({"sphere", 1});
  const ScalarFn1D f = [](double x) { return -x * x; };
  constexpr int kSamples = 1000000;

  SeededRng master(2401);
  double worst_pulls = 0.0;
  int points = 0;
  for (double mu : {-1.0, 0.0, 0.5, 2.0}) {
    for (double sigma : {0.3, 1.0, 3.0}) {
      for (double N : {0.5, 1.0, 2.0}) {
        SeededRng rng = master.split(static_cast<std::uint64_t>(points));
        const GradientEstimate est = estimate_gradient(
            sphere, Vector{mu}, sigma,
            PowerTransform::power(N, ShiftMode::none), kSamples, rng);
        const SurrogateEval quad = surrogate_quadrature(f, mu, sigma, N);
        const double target = sigma * sigma * quad.dF;
        const double second = sphere_weighted_second_moment(mu, sigma, N);
        const double se = std::sqrt((second - target * target) / kSamples);
        worst_pulls = std::max(worst_pulls,
                               std::abs(est.raw[0] - target) / se);
        ++points;
      }
    }
  }
  detail << points << " grid points at K=" << kSamples
         << ", worst |error|/se = " << worst_pulls << " (limit 3)";
  return worst_pulls <= 3.0;
}

// ---------------------------------------------------------------------
// 2. On the two-peak log objective the decaying-sigma run must hit the
//    sharp peak (mean MSE <= 0.005, mean best f >= 7.0) and beat every
//    fixed-sigma run of the same powered method on mean MSE.

// The basins only separate once sigma_t falls under ~0.5 (around t=550
// here), and whichever side of the saddle the iterate sits on at that
// moment decides the outcome.  Decaying steps plus a large sample count
// keep the iterate pinned to the moving smoothed maximum through that
// window; K=300 with polynomial decay leaves zero wrong-peak trials per
// 100 across seeds (K=200 still loses one occasionally).
ExperimentConfig two_log_config(const std::string& label, int trials,
                                std::uint64_t master_seed) {
  ExperimentConfig cfg;
  cfg.label = label;
  cfg.objective = {"two_log", 3};
  cfg.method = "gs_powerhp";
  cfg.optimizer.N = 1.0;
  cfg.optimizer.sigma_schedule =
      SigmaSchedule::geometric(3.0, 0.0, std::pow(0.1 / 3.0, 1e-3));
  cfg.optimizer.lr_schedule = LearningRateSchedule::polynomial(0.2);
  cfg.optimizer.K = 300;
  cfg.optimizer.T = 1000;
  cfg.trials = trials;
  cfg.master_seed = master_seed;
  return cfg;
}

bool criterion_two_log(std::ostringstream& detail) {
  const ExperimentResult hp =
      run_experiment(two_log_config("accept_two_log", 100, 7));
  if (hp.stats.aborted > 0 || !hp.stats.mean_mse) {
    detail << "decaying-sigma run aborted " << hp.stats.aborted << " trials";
    return false;
  }
  const double hp_mse = *hp.stats.mean_mse;
  bool ok = hp_mse <= 0.005 && hp.stats.mean_f_best >= 7.0;
  detail << "decaying sigma: mse=" << hp_mse
         << " (limit 0.005), f=" << hp.stats.mean_f_best
         << " (limit 7.0); fixed-sigma mse:";

  for (double sigma : {0.1, 0.5, 1.0, 2.0, 3.0}) {
    ExperimentConfig fixed = two_log_config("accept_two_log_fixed", 100, 7);
    fixed.method = "gs_poweropt";
    fixed.optimizer.sigma_schedule = SigmaSchedule::fixed(sigma);
    const ExperimentResult res = run_experiment(fixed);
    const double mse = res.stats.mean_mse.value_or(kInf);
    detail << ' ' << sigma << "->" << mse;
    ok = ok && mse >= hp_mse;
  }
  return ok;
}

// ---------------------------------------------------------------------
// 3/4. Multimodal and valley-shaped 2-d benchmarks converge to the known
//      maximizer across 100 random starts.

struct BenchmarkOutcome {
  bool ok = false;
  double mean_f = 0.0;
  double mean_mu[2] = {0.0, 0.0};
};

BenchmarkOutcome run_benchmark_2d(const ExperimentConfig& cfg, double f_floor,
                                  const double target_mu[2], double mu_tol) {
  BenchmarkOutcome out;
  const ExperimentResult res = run_experiment(cfg);
  if (res.stats.aborted > 0) return out;
  for (const TrialRow& row : res.rows) {
    out.mean_mu[0] += row.record.best_mu[0];
    out.mean_mu[1] += row.record.best_mu[1];
  }
  out.mean_mu[0] /= static_cast<double>(res.rows.size());
  out.mean_mu[1] /= static_cast<double>(res.rows.size());
  out.mean_f = res.stats.mean_f_best;
  out.ok = out.mean_f >= f_floor &&
           std::abs(out.mean_mu[0] - target_mu[0]) <= mu_tol &&
           std::abs(out.mean_mu[1] - target_mu[1]) <= mu_tol;
  return out;
}

bool criterion_ackley(std::ostringstream& detail) {
  ExperimentConfig cfg;
  cfg.label = "accept_ackley";
  cfg.objective = {"ackley2d", 2};
  cfg.method = "gs_powerhp";
  cfg.optimizer.N = 2.0;
  cfg.optimizer.sigma_schedule =
      SigmaSchedule::geometric(1.0, 0.0, std::pow(0.05, 1e-3));
  cfg.optimizer.lr_schedule = LearningRateSchedule::constant(0.1);
  cfg.optimizer.K = 10;
  cfg.optimizer.T = 1000;
  cfg.trials = 100;
  cfg.master_seed = 11;

  const double target[2] = {0.0, 0.0};
  const BenchmarkOutcome out = run_benchmark_2d(cfg, 22.6, target, 0.05);
  detail << "mean f=" << out.mean_f << " (limit 22.6), mean mu*=("
         << out.mean_mu[0] << ", " << out.mean_mu[1] << ") (|.| limit 0.05)";
  return out.ok;
}

bool criterion_rosenbrock(std::ostringstream& detail) {
  ExperimentConfig cfg;
  cfg.label = "accept_rosenbrock";
  cfg.objective = {"rosenbrock2d", 2};
  cfg.method = "gs_powerhp";
  cfg.optimizer.N = 3.0;
  cfg.optimizer.sigma_schedule =
      SigmaSchedule::geometric(1.0, 0.0, std::pow(0.05, 1e-3));
  cfg.optimizer.lr_schedule = LearningRateSchedule::constant(0.1);
  cfg.optimizer.K = 10;
  cfg.optimizer.T = 1000;
  // Start inside the gently sloped bowl: weights stay exp()-representable
  // for every point the box can draw.
  cfg.mu0_box_lo = -0.5;
  cfg.mu0_box_hi = 0.5;
  cfg.trials = 100;
  cfg.master_seed = 13;

  const double target[2] = {1.0, 1.0};
  const BenchmarkOutcome out = run_benchmark_2d(cfg, -0.1, target, 0.05);
  detail << "mean f=" << out.mean_f << " (limit -0.1), mean mu*=("
         << out.mean_mu[0] << ", " << out.mean_mu[1]
         << ") (target 1+-0.05 each)";
  return out.ok;
}

// ---------------------------------------------------------------------
// 5. The doubling search finds a finite minimal power whose surrogate
//    slope points at the sharp peak from every grid point, and the pass
//    fraction never drops along the ladder.

bool criterion_minimal_power(std::ostringstream& detail) {
  Objective two = make_objective({"two_log", 1});
  const ScalarFn1D f = as_scalar_fn(two);
  const PowerSearchResult res = find_minimal_power(
      f, -0.5, 1.0, 0.1, 3.0, 0.1, 0.01, 1e6, 0.01, trapezoid_spec());

  bool monotone = !res.ladder.empty();
  for (std::size_t i = 1; i < res.ladder.size(); ++i)
    monotone = monotone &&
               res.ladder[i].fraction >= res.ladder[i - 1].fraction;
  const bool ok = monotone && res.ladder.back().fraction == 1.0 &&
                  std::isfinite(res.minimal_N) && res.minimal_N > 0.01 &&
                  res.minimal_N < 1e6;
  detail << "minimal N=" << res.minimal_N << " after " << res.ladder.size()
         << " doubling rungs (fractions " << res.ladder.front().fraction
         << " -> " << res.ladder.back().fraction << ", monotone="
         << (monotone ? "yes" : "no") << ")";
  return ok;
}

// ---------------------------------------------------------------------
// 6. Shrinking sigma sharpens the surrogate slope next to the sharp peak
//    and flattens it far away.

bool criterion_slope_ordering(std::ostringstream& detail) {
  Objective two = make_objective({"two_log", 1});
  const ScalarFn1D f = as_scalar_fn(two);
  const QuadratureSpec spec = trapezoid_spec();

  std::vector<double> near, far;
  for (double sigma : {2.0, 1.0, 0.5, 0.1}) {
    near.push_back(std::abs(surrogate_quadrature(f, -0.4, sigma, 1.0, spec).dF));
    far.push_back(std::abs(surrogate_quadrature(f, 2.5, sigma, 1.0, spec).dF));
  }
  bool sharpens = true, flattens = true;
  for (std::size_t i = 1; i < near.size(); ++i) {
    sharpens = sharpens && near[i] > near[i - 1];
    flattens = flattens && far[i] < far[i - 1];
  }
  detail << "|dF| at mu=-0.4 for sigma 2,1,0.5,0.1: " << near[0] << ", "
         << near[1] << ", " << near[2] << ", " << near[3]
         << " (must rise); at mu=2.5: " << far[0] << ", " << far[1] << ", "
         << far[2] << ", " << far[3] << " (must fall)";
  return sharpens && flattens;
}

// ---------------------------------------------------------------------
// 7. Observable bound witnesses: every trial's worst log-scaled estimate
//    norm stays under ln(d) + 2N f*, and the quadrature gradient obeys
//    the matching Lipschitz constant on the sphere.

bool criterion_bound_witnesses(std::ostringstream& detail) {
  struct Case {
    const char* tag;
    ExperimentConfig cfg;
  };
  std::vector<Case> cases;

  cases.push_back({"two_log", two_log_config("accept_bounds_two_log", 20, 21)});

  ExperimentConfig ack;
  ack.label = "accept_bounds_ackley";
  ack.objective = {"ackley2d", 2};
  ack.method = "gs_powerhp";
  ack.optimizer.N = 2.0;
  ack.optimizer.sigma_schedule =
      SigmaSchedule::geometric(1.0, 0.0, std::pow(0.05, 1e-3));
  ack.optimizer.lr_schedule = LearningRateSchedule::constant(0.1);
  ack.optimizer.K = 10;
  ack.optimizer.T = 1000;
  ack.trials = 20;
  ack.master_seed = 22;
  cases.push_back({"ackley2d", ack});

  ExperimentConfig ros = ack;
  ros.label = "accept_bounds_rosenbrock";
  ros.objective = {"rosenbrock2d", 2};
  ros.optimizer.N = 3.0;
  ros.mu0_box_lo = -0.5;
  ros.mu0_box_hi = 0.5;
  ros.master_seed = 23;
  cases.push_back({"rosenbrock2d", ros});

  bool ok = true;
  double worst_gap = -kInf;  // stat minus bound; negative means satisfied
  for (const Case& c : cases) {
    Objective obj = make_objective(c.cfg.objective);
    // The two-peak objective's true maximum sits a hair off the sharp
    // center; pad the peak value to cover that gap.
    const double f_sup = obj.eval(*obj.known_maximizer()) + 1e-5;
    const double bound = std::log(static_cast<double>(obj.dim())) +
                         2.0 * *c.cfg.optimizer.N * f_sup;
    const ExperimentResult res = run_experiment(c.cfg);
    if (res.stats.aborted > 0) {
      detail << c.tag << " aborted trials; ";
      ok = false;
      continue;
    }
    for (const TrialRow& row : res.rows) {
      worst_gap = std::max(worst_gap, row.record.grad_bound_stat - bound);
      ok = ok && row.record.grad_bound_stat <= bound;
    }
  }
  detail << "60 trials, worst (stat - bound) = " << worst_gap
         << " (must be <= 0)";

  const TheoryConstants tc =
      theory_constants(1, 1.0, 1.0, 0.0, 2.0, 0.1, 0.25, 0.01, 0.0);
  const ScalarFn1D f = [](double x) { return -x * x; };
  const double h = 0.05;
  double worst_ratio = 0.0;
  double prev = surrogate_quadrature(f, -3.0, 1.0, 1.0).dF;
  for (double mu = -3.0 + h; mu <= 3.0 + 0.5 * h; mu += h) {
    const double cur = surrogate_quadrature(f, mu, 1.0, 1.0).dF;
    worst_ratio = std::max(worst_ratio, std::abs(cur - prev) / h);
    prev = cur;
  }
  detail << "; max |d2F|/dmu = " << worst_ratio << " vs L = " << tc.L;
  return ok && worst_ratio <= tc.L + 1e-9;
}

// ---------------------------------------------------------------------
// 8. The black-box attack drives every toy-classifier instance to a
//    successful, high-fidelity perturbation within the query budget.

AttackSuiteConfig attack_config(int instances, int T) {
  AttackSuiteConfig cfg;
  cfg.instances = instances;
  cfg.master_seed = 3;
  cfg.optimizer.N = 3.0;
  cfg.optimizer.sigma_schedule = SigmaSchedule::geometric(0.5, 0.05, 0.99);
  cfg.optimizer.lr_schedule = LearningRateSchedule::constant(0.05);
  cfg.optimizer.K = 10;
  cfg.optimizer.T = T;
  return cfg;
}

bool criterion_attack(std::ostringstream& detail) {
  const AttackSuiteConfig cfg = attack_config(20, 400);
  const AttackSuiteOutcome out = run_attack_suite(cfg);

  bool budget_ok = true, targets_ok = true;
  const std::int64_t expected =
      static_cast<std::int64_t>(cfg.optimizer.T) * (cfg.optimizer.K + 1);
  for (const AttackInstanceResult& r : out.results) {
    budget_ok = budget_ok && r.queries == expected;
    targets_ok = targets_ok && r.target != r.true_label;
    if (r.success)
      targets_ok = targets_ok && r.t_star >= 1 && r.t_star <= cfg.optimizer.T;
  }
  const double mean_r2 = out.summary.mean_r2.value_or(-kInf);
  detail << "success rate=" << out.summary.success_rate
         << " (must be 1.0), mean R^2=" << mean_r2
         << " (limit 0.5), classifier accuracy=" << out.classifier_accuracy
         << ", queries/instance=" << expected;
  return out.summary.success_rate == 1.0 && mean_r2 >= 0.5 && budget_ok &&
         targets_ok;
}

// ---------------------------------------------------------------------
// 9. Bitwise reproducibility: the same master seed gives byte-identical
//    outputs, independent of thread count.

bool criterion_reproducibility(std::ostringstream& detail) {
  ExperimentConfig cfg = two_log_config("accept_repro", 10, 7);
  cfg.optimizer.T = 300;
  cfg.threads = 4;
  const std::string a = trials_csv(run_experiment(cfg));
  const std::string b = trials_csv(run_experiment(cfg));
  cfg.threads = 1;
  const std::string c = trials_csv(run_experiment(cfg));

  const AttackSuiteConfig acfg = attack_config(4, 150);
  const std::string ja = attack_report_json(run_attack_suite(acfg));
  const std::string jb = attack_report_json(run_attack_suite(acfg));

  const bool repeat_ok = a == b;
  const bool threads_ok = a == c;
  const bool attack_ok = ja == jb;
  detail << "benchmark repeat " << (repeat_ok ? "identical" : "DIFFERS")
         << ", 4-thread vs 1-thread "
         << (threads_ok ? "identical" : "DIFFERS") << ", attack repeat "
         << (attack_ok ? "identical" : "DIFFERS");
  return repeat_ok && threads_ok && attack_ok;
}

// ---------------------------------------------------------------------
// 10. With a polynomially decaying step size the seed-averaged squared
//     estimate norm collapses: its running minimum at T=2000 sits at or
//     below 10% of the running minimum at t=10.

bool criterion_norm_decay(std::ostringstream& detail) {
  Objective sphere = make_objective({"sphere", 2});
  PowerHPConfig cfg;
  cfg.N = 1.0;
  cfg.sigma_schedule = SigmaSchedule::geometric(1.0, 0.05, 0.997);
  cfg.lr_schedule = LearningRateSchedule::polynomial(0.25);
  cfg.K = 10;
  cfg.T = 2000;
  cfg.mu0 = Vector{2.0, 1.0};
  cfg.digest_stride = 1;

  constexpr int kSeeds = 50;
  std::vector<double> avg_sq(static_cast<std::size_t>(cfg.T), 0.0);
  for (int s = 0; s < kSeeds; ++s) {
    cfg.seed = 9000 + static_cast<std::uint64_t>(s);
    const TrialRecord rec = run_gs_powerhp(sphere, cfg);
    if (rec.aborted || rec.digest.size() != avg_sq.size()) {
      detail << "seed " << cfg.seed << " aborted or produced a short digest";
      return false;
    }
    for (std::size_t i = 0; i < avg_sq.size(); ++i)
      avg_sq[i] += rec.digest[i].grad_norm * rec.digest[i].grad_norm;
  }
  for (double& v : avg_sq) v /= kSeeds;

  double early = kInf, final = kInf;
  for (std::size_t i = 0; i < avg_sq.size(); ++i) {
    final = std::min(final, avg_sq[i]);
    if (i < 10) early = std::min(early, avg_sq[i]);
  }
  detail << "running min of seed-averaged ||est||^2: t<=10 -> " << early
         << ", t<=2000 -> " << final << " (ratio "
         << (early > 0.0 ? final / early : kInf) << ", limit 0.1)";
  return early > 0.0 && final <= 0.1 * early;
}

// ---------------------------------------------------------------------

struct Criterion {
  int id;
  const char* name;
  bool (*run)(std::ostringstream&);
};

const Criterion kCriteria[] = {
    {1, "sampled gradients match quadrature", criterion_estimator},
    {2, "two-peak homotopy beats fixed sigma", criterion_two_log},
    {3, "ackley benchmark accuracy", criterion_ackley},
    {4, "rosenbrock benchmark accuracy", criterion_rosenbrock},
    {5, "minimal power search", criterion_minimal_power},
    {6, "surrogate slope ordering", criterion_slope_ordering},
    {7, "norm and smoothness bounds", criterion_bound_witnesses},
    {8, "black-box attack suite", criterion_attack},
    {9, "bitwise reproducibility", criterion_reproducibility},
    {10, "estimate norm decay", criterion_norm_decay},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--only <1..10>]\n", argv[0]);
      return 2;
    }
  }

  int failures = 0;
  for (const Criterion& c : kCriteria) {
    if (only != 0 && c.id != only) continue;
    std::ostringstream detail;
    bool pass = false;
    try {
      pass = c.run(detail);
    } catch (const std::exception& e) {
      detail << "exception: " << e.what();
    }
    if (!pass) ++failures;
    std::printf("[%s] %2d %s: %s\n", pass ? "PASS" : "FAIL", c.id, c.name,
                detail.str().c_str());
    std::fflush(stdout);
  }
  return failures;
}
