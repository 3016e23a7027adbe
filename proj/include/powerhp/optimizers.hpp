#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "powerhp/estimator.hpp"
#include "powerhp/objective.hpp"
#include "powerhp/rng.hpp"
#include "powerhp/vec.hpp"

namespace powerhp {

// Smoothing radius per iteration (1-indexed). geometric_decay follows
// sigma0 * beta^t + b, strictly decreasing toward the floor b.
struct SigmaSchedule {
  enum class Kind { fixed, geometric_decay };

  Kind kind = Kind::fixed;
  double sigma0 = 1.0;
  double b = 0.0;
  double beta = 1.0;

  static SigmaSchedule fixed(double sigma);
  static SigmaSchedule geometric(double sigma0, double b, double beta);

  double at(int t) const;  // t >= 1
  void validate() const;
};

struct LearningRateSchedule {
  enum class Kind { constant, polynomial };

  Kind kind = Kind::constant;
  double alpha = 0.1;   // constant step
  double gamma = 0.25;  // polynomial: (u+1)^-(1/2+gamma), gamma in (0, 1/2)

  static LearningRateSchedule constant(double alpha);
  static LearningRateSchedule polynomial(double gamma);

  double at(int update_index) const;  // 0-indexed
  void validate() const;
};

struct PowerHPConfig {
  std::optional<double> N;  // absent -> plain-objective weighting
  ShiftMode shift_mode = ShiftMode::subtract_reference;
  SigmaSchedule sigma_schedule;
  LearningRateSchedule lr_schedule;
  int K = 10;
  int T = 1000;
  Vector mu0;
  bool normalize_update = true;
  std::uint64_t seed = 0;
  int digest_stride = 0;  // 0 disables the trajectory digest

  void validate() const;
};

struct DigestRow {
  int t;
  double f_mu;
  double sigma;
  double grad_norm;  // of the raw estimate, as consumed by the update
};

struct TrialRecord {
  Vector best_mu;        // argmax f over the evaluated iterates
  double best_f = 0.0;   // = f(best_mu), re-evaluable
  int t_star = 0;        // 1-indexed iteration that produced best_mu
  Vector best_sample;    // best raw sample seen across all draws
  double best_sample_f = 0.0;
  std::int64_t queries = 0;  // total objective evaluations, T * (K + 1)
  std::vector<DigestRow> digest;
  // max over t of log(||est||^2 * e^{2N*shift} / sigma_t^2); comparing it
  // against log(d) + 2N*f(x*) checks the second-moment bound without ever
  // forming the (astronomically large) unshifted weights.
  double grad_bound_stat = 0.0;
  bool aborted = false;
  std::string abort_reason;
};

// Observer invoked once per iteration right after the current iterate is
// evaluated (and before sampling): (t, mu_t, f(mu_t), sigma_t).
using IterCallback =
    std::function<void(int, const Vector&, double, double)>;

// Shared single-loop engine. Per iteration: evaluate the current iterate
// (1 query, doubles as the shift reference and the record candidate), draw
// K samples for the gradient estimate, then step. Normalized mode moves
// exactly alpha_t along the estimate direction and holds position on a
// degenerate estimate; raw mode applies alpha_t * estimate (divided by
// sigma_t^2 when no power transform is set).
TrialRecord run_engine(Objective& objective, const PowerHPConfig& config,
                       SeededRng& rng, const IterCallback& callback = {});

TrialRecord run_engine(Objective& objective, const PowerHPConfig& config,
                       const IterCallback& callback = {});

// Power transform + decaying sigma + normalized ascent.
TrialRecord run_gs_powerhp(Objective& objective, const PowerHPConfig& config,
                           const IterCallback& callback = {});

// Power transform at a fixed sigma.
TrialRecord run_gs_poweropt(Objective& objective, const PowerHPConfig& config,
                            const IterCallback& callback = {});

// Plain-objective smoothing at fixed sigma, unnormalized two-scale update
// alpha_t * estimate / sigma^2.
TrialRecord run_zosgd(Objective& objective, const PowerHPConfig& config,
                      const IterCallback& callback = {});

// Plain-objective smoothing with the decaying sigma schedule; beta -> 1
// recovers run_zosgd exactly.
TrialRecord run_slgh_plain(Objective& objective, const PowerHPConfig& config,
                           const IterCallback& callback = {});

// Classical double-loop homotopy: an outer ladder of fixed smoothing
// levels sigma_j = max(sigma0 * beta^j, b), each running inner_T
// iterations of the plain-objective engine warm-started from the previous
// rung. outer_steps = 1 is exactly run_zosgd with T = inner_T.
TrialRecord run_double_loop_homotopy(Objective& objective,
                                     const PowerHPConfig& config,
                                     int outer_steps, int inner_T,
                                     const IterCallback& callback = {});

}  // namespace powerhp
