#pragma once

#include <optional>

#include "powerhp/objective.hpp"
#include "powerhp/rng.hpp"
#include "powerhp/vec.hpp"

namespace powerhp {

enum class ShiftMode { none, subtract_reference };

// Sample weighting for the smoothed-surrogate estimators. With N set, a
// sample w contributes exp(N * (f(w) - shift)); without N the plain value
// f(w) is used and shift_mode is ignored.
struct PowerTransform {
  std::optional<double> N;
  ShiftMode shift_mode = ShiftMode::none;

  static PowerTransform power(double n,
                              ShiftMode mode = ShiftMode::subtract_reference) {
    return PowerTransform{n, mode};
  }
  static PowerTransform identity() { return PowerTransform{}; }

  void validate() const;
};

// exp() overflows a double just above this exponent; anything at or past
// it aborts the estimate instead of producing inf.
constexpr double kMaxWeightExponent = 709.0;

// A raw gradient estimate with norm at or below this is treated as
// directionless: normalizing it would amplify pure noise.
constexpr double kDegenerateNorm = 1e-300;

struct GradientEstimate {
  Vector raw;                   // (1/K) sum (w_k - mu) * weight(f(w_k))
  double norm = 0.0;            // ||raw||
  std::optional<Vector> normalized;  // raw / norm; absent when degenerate
  bool degenerate = false;
  int samples_used = 0;
  double shift_used = 0.0;      // reference value subtracted inside exp()
  Vector best_sample;           // argmax f(w_k) over the K draws
  double best_sample_value = 0.0;
};

// Weight of a single sample under the transform. Requires transform.N;
// counts one objective query. f_ref is subtracted when shift_mode says so.
double f_power(Objective& objective, const Vector& w,
               const PowerTransform& transform, double f_ref);

// Monte Carlo estimate of sigma^2 * grad F from K Gaussian samples around
// mu. Expectation of .raw is sigma^2 * grad F_{N,sigma}(mu) scaled by
// exp(-N * shift); the normalized direction is shift-invariant. Consumes
// exactly K objective queries when f_ref is supplied (or not needed), one
// more when subtract_reference has to evaluate f(mu) itself.
GradientEstimate estimate_gradient(Objective& objective, const Vector& mu,
                                   double sigma,
                                   const PowerTransform& transform, int K,
                                   SeededRng& rng,
                                   std::optional<double> f_ref = std::nullopt);

// Monte Carlo estimate of the surrogate value F_{N,sigma}(mu) (times
// exp(-N * shift) when shifted). Same sampling and error contract as
// estimate_gradient.
double surrogate_value(Objective& objective, const Vector& mu, double sigma,
                       const PowerTransform& transform, int K, SeededRng& rng,
                       std::optional<double> f_ref = std::nullopt);

}  // namespace powerhp
