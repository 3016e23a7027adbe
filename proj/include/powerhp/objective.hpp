#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "powerhp/errors.hpp"
#include "powerhp/vec.hpp"

namespace powerhp {

using ScalarFn = std::function<double(const Vector&)>;

// A black-box function to maximize. Every eval() bumps the query counter,
// which is the budget accounting the optimizers report. Not thread-safe:
// each trial worker owns its own instance.
class Objective {
 public:
  Objective(std::string name, int dim, ScalarFn fn,
            std::optional<Vector> known_maximizer = std::nullopt)
      : name_(std::move(name)),
        dim_(dim),
        fn_(std::move(fn)),
        known_maximizer_(std::move(known_maximizer)) {
    if (dim_ < 1) throw UsageError("Objective: dim must be >= 1");
    if (!fn_) throw UsageError("Objective: missing function");
    if (known_maximizer_ &&
        known_maximizer_->dim() != static_cast<std::size_t>(dim_))
      throw UsageError("Objective: known_maximizer dimension mismatch");
  }

  double eval(const Vector& x) {
    if (x.dim() != static_cast<std::size_t>(dim_))
      throw UsageError("Objective::eval: point has dim " +
                       std::to_string(x.dim()) + ", expected " +
                       std::to_string(dim_));
    ++query_count_;
    return fn_(x);
  }

  double operator()(const Vector& x) { return eval(x); }

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  const std::optional<Vector>& known_maximizer() const {
    return known_maximizer_;
  }

  std::int64_t query_count() const { return query_count_; }
  void reset_query_count() { query_count_ = 0; }

  // Uncounted access for quadrature oracles; optimizers must go through
  // eval() so budgets stay honest.
  const ScalarFn& raw_fn() const { return fn_; }

 private:
  std::string name_;
  int dim_;
  ScalarFn fn_;
  std::optional<Vector> known_maximizer_;
  std::int64_t query_count_ = 0;
};

}  // namespace powerhp
