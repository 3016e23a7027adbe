#include "powerhp/objectives.hpp"

#include <cmath>
#include <numbers>

#include "powerhp/errors.hpp"

namespace powerhp {

namespace {

constexpr double kTwoLogC1 = 1e-5;   // sharpens the peak at m1
constexpr double kTwoLogC2 = 1e-2;   // flattens the peak at m2

double sphere(const Vector& x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return -acc;
}

// Inverted Ackley: global maximum 20 + e at the origin, ringed by the
// usual lattice of cosine side peaks.
double ackley2d(const Vector& x) {
  const double sq = 0.5 * (x[0] * x[0] + x[1] * x[1]);
  const double c = std::cos(2.0 * std::numbers::pi * x[0]) +
                   std::cos(2.0 * std::numbers::pi * x[1]);
  return 20.0 * std::exp(-std::sqrt(sq) / 5.0) + std::exp(0.5 * c);
}

double rosenbrock2d(const Vector& x) {
  const double a = x[1] - x[0] * x[0];
  const double b = 1.0 - x[0];
  return -100.0 * a * a - b * b;
}

double sq_dist(const Vector& x, const Vector& m) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.dim(); ++i) {
    const double diff = x[i] - m[i];
    acc += diff * diff;
  }
  return acc;
}

}  // namespace

Objective make_objective(const BenchmarkSpec& spec) {
  if (spec.dim < 1)
    throw ConfigError("objective '" + spec.name + "': dim must be >= 1");

  if (spec.name == "sphere") {
    return Objective("sphere", spec.dim, sphere,
                     Vector::zeros(static_cast<std::size_t>(spec.dim)));
  }

  if (spec.name == "ackley2d") {
    if (spec.dim != 2) throw ConfigError("ackley2d: dim must be 2");
    return Objective("ackley2d", 2, ackley2d, Vector::zeros(2));
  }

  if (spec.name == "rosenbrock2d") {
    if (spec.dim != 2) throw ConfigError("rosenbrock2d: dim must be 2");
    return Objective("rosenbrock2d", 2, rosenbrock2d, Vector{1.0, 1.0});
  }

  if (spec.name == "two_log") {
    const std::size_t d = static_cast<std::size_t>(spec.dim);
    Vector m1 = spec.m1.value_or(Vector::constant(d, -0.5));
    Vector m2 = spec.m2.value_or(Vector::constant(d, 0.5));
    if (m1.dim() != d || m2.dim() != d)
      throw ConfigError("two_log: m1/m2 dimension mismatch");
    // Two log peaks of very different sharpness; m1 carries the higher
    // (global) one because its softening constant is 1000x smaller.
    auto fn = [m1, m2](const Vector& x) {
      return -std::log(sq_dist(x, m1) + kTwoLogC1) -
             std::log(sq_dist(x, m2) + kTwoLogC2);
    };
    return Objective("two_log", spec.dim, fn, m1);
  }

  throw ConfigError("unknown objective '" + spec.name + "'");
}

std::vector<std::string> objective_names() {
  return {"sphere", "two_log", "ackley2d", "rosenbrock2d"};
}

}  // namespace powerhp
