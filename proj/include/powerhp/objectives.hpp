#pragma once

#include <optional>
#include <string>
#include <vector>

#include "powerhp/objective.hpp"
#include "powerhp/vec.hpp"

namespace powerhp {

// Everything needed to instantiate one of the built-in benchmark
// objectives. m1/m2 only apply to two_log; when absent they default to
// all-(-0.5) and all-(+0.5).
struct BenchmarkSpec {
  std::string name;
  int dim = 0;
  std::optional<Vector> m1;
  std::optional<Vector> m2;
};

// Registered names: "sphere" (any d), "two_log" (any d),
// "ackley2d" (d=2), "rosenbrock2d" (d=2). All are maximization problems
// with a known unique maximizer. Throws ConfigError for unknown names or
// invalid dimensions.
Objective make_objective(const BenchmarkSpec& spec);

std::vector<std::string> objective_names();

}  // namespace powerhp
