#include "powerhp/estimator.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "powerhp/errors.hpp"

namespace powerhp {

namespace {

double checked_weight(double fval, double N, double shift) {
  const double exponent = N * (fval - shift);
  if (exponent >= kMaxWeightExponent || !std::isfinite(exponent))
    throw EstimatorError(exponent,
                         "weight exponent " + std::to_string(exponent) +
                             " exceeds exp() range; raise the shift or "
                             "lower N");
  return std::exp(exponent);
}

void check_sampling_args(const Vector& mu, double sigma, int K) {
  if (mu.dim() == 0) throw UsageError("estimator: mu must be non-empty");
  if (sigma <= 0.0) throw UsageError("estimator: sigma must be > 0");
  if (K < 1) throw UsageError("estimator: K must be >= 1");
}

}  // namespace

void PowerTransform::validate() const {
  if (N && *N <= 0.0)
    throw UsageError("PowerTransform: N must be > 0 when present");
}

double f_power(Objective& objective, const Vector& w,
               const PowerTransform& transform, double f_ref) {
  transform.validate();
  if (!transform.N)
    throw UsageError("f_power: transform must carry a power N");
  const double shift =
      transform.shift_mode == ShiftMode::subtract_reference ? f_ref : 0.0;
  return checked_weight(objective.eval(w), *transform.N, shift);
}

GradientEstimate estimate_gradient(Objective& objective, const Vector& mu,
                                   double sigma,
                                   const PowerTransform& transform, int K,
                                   SeededRng& rng,
                                   std::optional<double> f_ref) {
  transform.validate();
  check_sampling_args(mu, sigma, K);

  double shift = 0.0;
  if (transform.N && transform.shift_mode == ShiftMode::subtract_reference)
    shift = f_ref ? *f_ref : objective.eval(mu);

  const std::size_t d = mu.dim();
  std::vector<double> acc(d, 0.0);
  std::vector<double> offset(d);

  GradientEstimate est;
  est.samples_used = K;
  est.shift_used = shift;
  est.best_sample_value = -std::numeric_limits<double>::infinity();

  for (int k = 0; k < K; ++k) {
    std::vector<double> w(d);
    for (std::size_t i = 0; i < d; ++i) {
      offset[i] = sigma * rng.normal();
      w[i] = mu[i] + offset[i];
    }
    Vector sample(std::move(w));
    const double fval = objective.eval(sample);
    const double weight =
        transform.N ? checked_weight(fval, *transform.N, shift) : fval;
    for (std::size_t i = 0; i < d; ++i) acc[i] += offset[i] * weight;
    if (fval > est.best_sample_value) {
      est.best_sample_value = fval;
      est.best_sample = sample;
    }
  }

  const double inv_k = 1.0 / static_cast<double>(K);
  for (double& a : acc) a *= inv_k;
  est.raw = Vector(std::move(acc));
  est.norm = norm(est.raw);

  if (est.norm <= kDegenerateNorm) {
    est.degenerate = true;
  } else {
    est.normalized = scale(est.raw, 1.0 / est.norm);
  }
  return est;
}

double surrogate_value(Objective& objective, const Vector& mu, double sigma,
                       const PowerTransform& transform, int K, SeededRng& rng,
                       std::optional<double> f_ref) {
  transform.validate();
  check_sampling_args(mu, sigma, K);

  double shift = 0.0;
  if (transform.N && transform.shift_mode == ShiftMode::subtract_reference)
    shift = f_ref ? *f_ref : objective.eval(mu);

  const std::size_t d = mu.dim();
  double acc = 0.0;
  for (int k = 0; k < K; ++k) {
    std::vector<double> w(d);
    for (std::size_t i = 0; i < d; ++i) w[i] = mu[i] + sigma * rng.normal();
    const double fval = objective.eval(Vector(std::move(w)));
    acc += transform.N ? checked_weight(fval, *transform.N, shift) : fval;
  }
  return acc / static_cast<double>(K);
}

}  // namespace powerhp
