#pragma once

#include <stdexcept>
#include <string>

namespace powerhp {

// Bad call-site arguments (dimension mismatch, out-of-range parameters).
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Malformed or inconsistent experiment configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Weight computation left the representable range; carries the exponent
// that would have been fed to exp().
struct EstimatorError : std::runtime_error {
  double exponent;
  explicit EstimatorError(double exponent_, const std::string& what_)
      : std::runtime_error(what_), exponent(exponent_) {}
};

// Quadrature failed to converge under refinement.
struct OracleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Classifier construction or training fell short of its contract.
struct ClassifierError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace powerhp
