#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "powerhp/errors.hpp"

namespace powerhp {

// Dense point in R^d. Construction rejects empty or non-finite content so
// downstream numerics never have to re-check.
class Vector {
 public:
  Vector() = default;

  explicit Vector(std::vector<double> entries) : v_(std::move(entries)) {
    validate();
  }

  Vector(std::initializer_list<double> entries) : v_(entries) { validate(); }

  static Vector zeros(std::size_t dim) {
    return Vector(std::vector<double>(dim, 0.0));
  }

  static Vector constant(std::size_t dim, double value) {
    return Vector(std::vector<double>(dim, value));
  }

  std::size_t dim() const { return v_.size(); }
  double operator[](std::size_t i) const { return v_[i]; }
  double& operator[](std::size_t i) { return v_[i]; }
  const std::vector<double>& entries() const { return v_; }
  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }

  auto begin() const { return v_.begin(); }
  auto end() const { return v_.end(); }

  bool operator==(const Vector& other) const { return v_ == other.v_; }

 private:
  void validate() const {
    if (v_.empty()) throw UsageError("Vector: dimension must be >= 1");
    for (double x : v_) {
      if (!std::isfinite(x))
        throw UsageError("Vector: entries must be finite");
    }
  }

  std::vector<double> v_;
};

inline void check_same_dim(const Vector& a, const Vector& b,
                           const char* where) {
  if (a.dim() != b.dim())
    throw UsageError(std::string(where) + ": dimension mismatch (" +
                     std::to_string(a.dim()) + " vs " +
                     std::to_string(b.dim()) + ")");
}

inline Vector add(const Vector& a, const Vector& b) {
  check_same_dim(a, b, "add");
  std::vector<double> out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] = a[i] + b[i];
  return Vector(std::move(out));
}

inline Vector sub(const Vector& a, const Vector& b) {
  check_same_dim(a, b, "sub");
  std::vector<double> out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] = a[i] - b[i];
  return Vector(std::move(out));
}

inline Vector scale(const Vector& a, double s) {
  std::vector<double> out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] = s * a[i];
  return Vector(std::move(out));
}

// a + s * b, the shape every optimizer update takes.
inline Vector axpy(const Vector& a, double s, const Vector& b) {
  check_same_dim(a, b, "axpy");
  std::vector<double> out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] = a[i] + s * b[i];
  return Vector(std::move(out));
}

inline double dot(const Vector& a, const Vector& b) {
  check_same_dim(a, b, "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double sq_norm(const Vector& a) { return dot(a, a); }

inline double norm(const Vector& a) { return std::sqrt(sq_norm(a)); }

// Dimension-normalized squared distance ||a - b||^2 / d.
inline double mse(const Vector& a, const Vector& b) {
  check_same_dim(a, b, "mse");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double diff = a[i] - b[i];
    acc += diff * diff;
  }
  return acc / static_cast<double>(a.dim());
}

}  // namespace powerhp
