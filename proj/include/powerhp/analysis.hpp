#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "powerhp/objective.hpp"

namespace powerhp {

using ScalarFn1D = std::function<double(double)>;

// View a 1-dimensional Objective as a plain scalar function. Evaluations
// through this adapter are oracle calls and bypass query counting.
ScalarFn1D as_scalar_fn(const Objective& objective);

enum class QuadratureRule { gauss_hermite, trapezoid };

struct QuadratureSpec {
  QuadratureRule rule = QuadratureRule::gauss_hermite;
  int nodes = 64;            // GH points, or initial trapezoid panel count
  double half_width = 10.0;  // trapezoid window half-width, in sigmas
  double tol = 1e-8;         // agreement required between refinements
  int max_refinements = 14;

  void validate() const;
};

// Nodes and weights for integrating against exp(-z^2); exact for
// polynomials up to degree 2n - 1.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussHermiteRule gauss_hermite_rule(int n);

// Deterministic evaluation of the smoothed surrogate
//   F(mu) = E_{x ~ N(mu, sigma^2)}[exp(N f(x))]
// and its mu-derivative. Internally everything is computed against a log
// shift S = max over evaluated points of N f(x), so sharply peaked
// integrands stay in range; F = exp(log_scale) * F_scaled may round to
// inf even when the scaled pair is perfectly healthy. Throws OracleError
// when refinement fails to reach spec.tol.
struct SurrogateEval {
  double F = 0.0;
  double dF = 0.0;
  double log_scale = 0.0;
  double F_scaled = 0.0;
  double dF_scaled = 0.0;
};
SurrogateEval surrogate_quadrature(const ScalarFn1D& f, double mu,
                                   double sigma, double N,
                                   const QuadratureSpec& spec = {});

// Checks the two-sided descent/ascent sign pattern of dF around a known
// maximizer x_star: every grid point with mu > x_star + delta must have
// dF < 0 and every point with mu < x_star - delta must have dF > 0, on
// the band |mu| < M.
struct SignConditionReport {
  double N = 0.0;
  int points_checked = 0;
  int points_passed = 0;
  double fraction = 0.0;
  double worst_mu = 0.0;  // location of a violation when fraction < 1
};
SignConditionReport sign_condition_report(const ScalarFn1D& f, double x_star,
                                          double N, double sigma,
                                          double delta, double M,
                                          double grid_step,
                                          const QuadratureSpec& spec = {});

// Doubling search from N_start for the smallest power at which the sign
// conditions hold everywhere, refined by bisection to rel_tol. The ladder
// keeps one report per doubling step. Throws OracleError if N_cap is hit
// without a pass.
struct PowerSearchResult {
  double minimal_N = 0.0;
  std::vector<SignConditionReport> ladder;
};
PowerSearchResult find_minimal_power(const ScalarFn1D& f, double x_star,
                                     double sigma, double delta, double M,
                                     double grid_step, double N_start = 0.01,
                                     double N_cap = 1e6,
                                     double rel_tol = 0.01,
                                     const QuadratureSpec& spec = {});

struct LandscapeRow {
  double sigma;
  double mu;
  double F;
  double dF;
};
std::vector<LandscapeRow> landscape_curves(const ScalarFn1D& f, double N,
                                           const std::vector<double>& sigmas,
                                           const std::vector<double>& mu_grid,
                                           const QuadratureSpec& spec = {});
// Header: sigma,mu,F,dF
void write_landscape_csv(std::ostream& out,
                         const std::vector<LandscapeRow>& rows);

// Riemann zeta for s > 1 via Euler-Maclaurin, absolute error <= 1e-10.
double zeta(double s);

// Smoothness/second-moment constants and the iteration-count bound for
// the polynomial step-size schedule. The tail-sum constant is computed
// two ways: `c0` uses the 2 f^3 coefficient, `c0_dim_sq` the 2 d^2 f^3
// variant; downstream values are derived from both.
struct TheoryConstants {
  double L = 0.0;          // gradient Lipschitz constant 2 d sigma^-2 e^{N f*}
  double G = 0.0;          // estimator second-moment bound d sigma^2 e^{2N f*}
  double zeta_tail = 0.0;  // sum_{t>=1} t^{-(1+2gamma)}
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double t_bound = 0.0;
  double c0_dim_sq = 0.0;
  double c1_dim_sq = 0.0;
  double c2_dim_sq = 0.0;
  double t_bound_dim_sq = 0.0;
};
TheoryConstants theory_constants(int d, double sigma, double N, double f_star,
                                 double L_f, double b, double gamma,
                                 double eps, double F0);

}  // namespace powerhp
