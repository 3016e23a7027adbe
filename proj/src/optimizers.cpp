#include "powerhp/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "powerhp/errors.hpp"

namespace powerhp {

SigmaSchedule SigmaSchedule::fixed(double sigma) {
  SigmaSchedule s;
  s.kind = Kind::fixed;
  s.sigma0 = sigma;
  return s;
}

SigmaSchedule SigmaSchedule::geometric(double sigma0, double b, double beta) {
  SigmaSchedule s;
  s.kind = Kind::geometric_decay;
  s.sigma0 = sigma0;
  s.b = b;
  s.beta = beta;
  return s;
}

double SigmaSchedule::at(int t) const {
  if (t < 1) throw UsageError("SigmaSchedule::at: t must be >= 1");
  if (kind == Kind::fixed) return sigma0;
  return sigma0 * std::pow(beta, static_cast<double>(t)) + b;
}

void SigmaSchedule::validate() const {
  if (sigma0 <= 0.0) throw ConfigError("sigma schedule: sigma0 must be > 0");
  if (kind == Kind::geometric_decay) {
    if (b < 0.0) throw ConfigError("sigma schedule: floor b must be >= 0");
    if (beta <= 0.0 || beta >= 1.0)
      throw ConfigError("sigma schedule: beta must lie in (0, 1)");
  }
}

LearningRateSchedule LearningRateSchedule::constant(double alpha) {
  LearningRateSchedule s;
  s.kind = Kind::constant;
  s.alpha = alpha;
  return s;
}

LearningRateSchedule LearningRateSchedule::polynomial(double gamma) {
  LearningRateSchedule s;
  s.kind = Kind::polynomial;
  s.gamma = gamma;
  return s;
}

double LearningRateSchedule::at(int update_index) const {
  if (update_index < 0)
    throw UsageError("LearningRateSchedule::at: index must be >= 0");
  if (kind == Kind::constant) return alpha;
  return std::pow(static_cast<double>(update_index + 1), -(0.5 + gamma));
}

void LearningRateSchedule::validate() const {
  if (kind == Kind::constant) {
    if (alpha <= 0.0) throw ConfigError("lr schedule: alpha must be > 0");
  } else {
    if (gamma <= 0.0 || gamma >= 0.5)
      throw ConfigError("lr schedule: gamma must lie in (0, 1/2)");
  }
}

void PowerHPConfig::validate() const {
  if (N && *N <= 0.0) throw ConfigError("config: N must be > 0 when present");
  sigma_schedule.validate();
  lr_schedule.validate();
  if (K < 1) throw ConfigError("config: K must be >= 1");
  if (T < 1) throw ConfigError("config: T must be >= 1");
  if (mu0.dim() == 0) throw ConfigError("config: mu0 is required");
  if (digest_stride < 0)
    throw ConfigError("config: digest_stride must be >= 0");
}

namespace {

PowerTransform transform_of(const PowerHPConfig& config) {
  PowerTransform tr;
  tr.N = config.N;
  tr.shift_mode = config.shift_mode;
  return tr;
}

// One engine pass appending onto a partially filled record, so the
// double-loop can chain rungs through a shared rng and running best.
// Returns the final (post-update) iterate for warm starts.
Vector engine_pass(Objective& objective, const PowerHPConfig& config,
                   SeededRng& rng, const IterCallback& callback,
                   TrialRecord& rec, int t_offset) {
  const PowerTransform transform = transform_of(config);
  Vector mu = config.mu0;

  for (int t = 1; t <= config.T; ++t) {
    const int global_t = t_offset + t;
    const double sigma_t = config.sigma_schedule.at(t);
    const double f_cur = objective.eval(mu);
    if (f_cur > rec.best_f) {
      rec.best_f = f_cur;
      rec.best_mu = mu;
      rec.t_star = global_t;
    }
    if (callback) callback(global_t, mu, f_cur, sigma_t);

    std::optional<double> f_ref;
    if (config.N && config.shift_mode == ShiftMode::subtract_reference)
      f_ref = f_cur;

    GradientEstimate est;
    try {
      est = estimate_gradient(objective, mu, sigma_t, transform, config.K,
                              rng, f_ref);
    } catch (const EstimatorError& e) {
      rec.aborted = true;
      rec.abort_reason = e.what();
      rec.queries = objective.query_count();
      return mu;
    }

    if (est.best_sample_value > rec.best_sample_f ||
        rec.best_sample.dim() == 0) {
      rec.best_sample_f = est.best_sample_value;
      rec.best_sample = est.best_sample;
    }

    if (est.norm > 0.0) {
      const double shift_term =
          config.N ? 2.0 * *config.N * est.shift_used : 0.0;
      const double stat =
          2.0 * std::log(est.norm) + shift_term - 2.0 * std::log(sigma_t);
      rec.grad_bound_stat = std::max(rec.grad_bound_stat, stat);
    }

    if (config.digest_stride > 0 &&
        (t - 1) % config.digest_stride == 0) {
      rec.digest.push_back({global_t, f_cur, sigma_t, est.norm});
    }

    const double alpha = config.lr_schedule.at(t - 1);
    if (config.normalize_update) {
      // Degenerate estimate: no usable direction, hold position.
      if (!est.degenerate) mu = axpy(mu, alpha, *est.normalized);
    } else if (config.N) {
      mu = axpy(mu, alpha, est.raw);
    } else {
      mu = axpy(mu, alpha / (sigma_t * sigma_t), est.raw);
    }
  }
  rec.queries = objective.query_count();
  return mu;
}

TrialRecord fresh_record() {
  TrialRecord rec;
  rec.best_f = -std::numeric_limits<double>::infinity();
  rec.best_sample_f = -std::numeric_limits<double>::infinity();
  rec.grad_bound_stat = -std::numeric_limits<double>::infinity();
  return rec;
}

}  // namespace

TrialRecord run_engine(Objective& objective, const PowerHPConfig& config,
                       SeededRng& rng, const IterCallback& callback) {
  config.validate();
  if (config.mu0.dim() != static_cast<std::size_t>(objective.dim()))
    throw ConfigError("config: mu0 dimension does not match objective");
  objective.reset_query_count();
  TrialRecord rec = fresh_record();
  engine_pass(objective, config, rng, callback, rec, 0);
  return rec;
}

TrialRecord run_engine(Objective& objective, const PowerHPConfig& config,
                       const IterCallback& callback) {
  SeededRng rng(config.seed);
  return run_engine(objective, config, rng, callback);
}

TrialRecord run_gs_powerhp(Objective& objective, const PowerHPConfig& config,
                           const IterCallback& callback) {
  if (!config.N) throw ConfigError("gs_powerhp: N is required");
  if (config.sigma_schedule.kind != SigmaSchedule::Kind::geometric_decay)
    throw ConfigError("gs_powerhp: sigma schedule must be geometric_decay");
  if (!config.normalize_update)
    throw ConfigError("gs_powerhp: normalize_update must be set");
  return run_engine(objective, config, callback);
}

TrialRecord run_gs_poweropt(Objective& objective, const PowerHPConfig& config,
                            const IterCallback& callback) {
  if (!config.N) throw ConfigError("gs_poweropt: N is required");
  if (config.sigma_schedule.kind != SigmaSchedule::Kind::fixed)
    throw ConfigError("gs_poweropt: sigma schedule must be fixed");
  if (!config.normalize_update)
    throw ConfigError("gs_poweropt: normalize_update must be set");
  return run_engine(objective, config, callback);
}

TrialRecord run_zosgd(Objective& objective, const PowerHPConfig& config,
                      const IterCallback& callback) {
  if (config.N) throw ConfigError("zosgd: N must be absent");
  if (config.sigma_schedule.kind != SigmaSchedule::Kind::fixed)
    throw ConfigError("zosgd: sigma schedule must be fixed");
  if (config.normalize_update)
    throw ConfigError("zosgd: normalize_update must be off");
  return run_engine(objective, config, callback);
}

TrialRecord run_slgh_plain(Objective& objective, const PowerHPConfig& config,
                           const IterCallback& callback) {
  if (config.N) throw ConfigError("slgh_plain: N must be absent");
  if (config.sigma_schedule.kind != SigmaSchedule::Kind::geometric_decay)
    throw ConfigError("slgh_plain: sigma schedule must be geometric_decay");
  if (config.normalize_update)
    throw ConfigError("slgh_plain: normalize_update must be off");
  return run_engine(objective, config, callback);
}

TrialRecord run_double_loop_homotopy(Objective& objective,
                                     const PowerHPConfig& config,
                                     int outer_steps, int inner_T,
                                     const IterCallback& callback) {
  if (config.N) throw ConfigError("double_loop: N must be absent");
  if (config.normalize_update)
    throw ConfigError("double_loop: normalize_update must be off");
  if (outer_steps < 1) throw ConfigError("double_loop: outer_steps >= 1");
  if (inner_T < 1) throw ConfigError("double_loop: inner_T >= 1");
  config.validate();
  if (config.mu0.dim() != static_cast<std::size_t>(objective.dim()))
    throw ConfigError("config: mu0 dimension does not match objective");

  const double sigma0 = config.sigma_schedule.sigma0;
  const double beta = config.sigma_schedule.kind ==
                              SigmaSchedule::Kind::geometric_decay
                          ? config.sigma_schedule.beta
                          : 1.0;
  const double floor = config.sigma_schedule.b;

  objective.reset_query_count();
  SeededRng rng(config.seed);
  TrialRecord rec = fresh_record();

  Vector mu = config.mu0;
  for (int j = 0; j < outer_steps; ++j) {
    const double sigma_j =
        std::max(sigma0 * std::pow(beta, static_cast<double>(j)), floor);
    PowerHPConfig rung = config;
    rung.sigma_schedule = SigmaSchedule::fixed(sigma_j);
    rung.T = inner_T;
    rung.mu0 = mu;
    mu = engine_pass(objective, rung, rng, callback, rec, j * inner_T);
    if (rec.aborted) return rec;
  }
  rec.queries = objective.query_count();
  return rec;
}

}  // namespace powerhp
