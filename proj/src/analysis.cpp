#include "powerhp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include "powerhp/errors.hpp"

namespace powerhp {

namespace {

// Symmetric tridiagonal QL with implicit shifts, rotating a row vector z
// along (the Golub-Welsch reduction: z starts as e_1, ends as the first
// components of the eigenvectors). diag/off are modified in place; off is
// one shorter than diag.
void tridiag_ql(std::vector<double>& diag, std::vector<double>& off,
                std::vector<double>& z) {
  const int n = static_cast<int>(diag.size());
  std::vector<double> e(off);
  e.push_back(0.0);

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(diag[m]) + std::abs(diag[m + 1]);
        if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd)
          break;
      }
      if (m != l) {
        if (++iter > 50)
          throw OracleError("gauss_hermite_rule: QL failed to converge");
        double g = (diag[l + 1] - diag[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = diag[m] - diag[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        for (int i = m - 1; i >= l; --i) {
          double fi = s * e[i];
          const double bi = c * e[i];
          r = std::hypot(fi, g);
          e[i + 1] = r;
          if (r == 0.0) {
            diag[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = fi / r;
          c = g / r;
          g = diag[i + 1] - p;
          r = (diag[i] - g) * s + 2.0 * c * bi;
          p = s * r;
          diag[i + 1] = g + p;
          g = c * r - bi;
          fi = z[i + 1];
          z[i + 1] = s * z[i] + c * fi;
          z[i] = c * z[i] - s * fi;
        }
        if (r == 0.0 && m - 1 >= l) continue;
        diag[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }

  // Sort ascending, carrying z.
  for (int i = 0; i < n - 1; ++i) {
    int k = i;
    for (int j = i + 1; j < n; ++j)
      if (diag[j] < diag[k]) k = j;
    if (k != i) {
      std::swap(diag[i], diag[k]);
      std::swap(z[i], z[k]);
    }
  }
}

struct ScaledPair {
  double log_scale;  // S
  double F_scaled;   // e^{-S} * F
  double dF_scaled;  // e^{-S} * dF
};

// One Gauss-Hermite evaluation at a given node count.
ScaledPair gh_eval(const ScalarFn1D& f, double mu, double sigma, double N,
                   int n) {
  const GaussHermiteRule rule = gauss_hermite_rule(n);
  const double root2 = std::numbers::sqrt2;
  std::vector<double> expo(rule.nodes.size());
  double S = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    expo[i] = N * f(mu + root2 * sigma * rule.nodes[i]);
    S = std::max(S, expo[i]);
  }
  const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
  double acc_f = 0.0, acc_df = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double w = rule.weights[i] * std::exp(expo[i] - S);
    acc_f += w;
    acc_df += w * root2 * rule.nodes[i] / sigma;
  }
  return {S, inv_sqrt_pi * acc_f, inv_sqrt_pi * acc_df};
}

// One trapezoid evaluation over [mu - c*sigma, mu + c*sigma] with the
// given panel count.
ScaledPair trapezoid_eval(const ScalarFn1D& f, double mu, double sigma,
                          double N, double half_width_sigmas, int panels) {
  const double lo = mu - half_width_sigmas * sigma;
  const double hi = mu + half_width_sigmas * sigma;
  const double h = (hi - lo) / static_cast<double>(panels);
  const int points = panels + 1;

  std::vector<double> expo(points);
  double S = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < points; ++j) {
    const double x = lo + h * static_cast<double>(j);
    expo[j] = N * f(x);
    S = std::max(S, expo[j]);
  }
  const double norm_const = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
  double acc_f = 0.0, acc_df = 0.0;
  for (int j = 0; j < points; ++j) {
    const double x = lo + h * static_cast<double>(j);
    const double u = (x - mu) / sigma;
    double g = norm_const * std::exp(expo[j] - S - 0.5 * u * u);
    if (j == 0 || j == points - 1) g *= 0.5;
    acc_f += g;
    acc_df += g * (x - mu) / (sigma * sigma);
  }
  return {S, acc_f * h, acc_df * h};
}

SurrogateEval finish(const ScaledPair& p) {
  SurrogateEval out;
  out.log_scale = p.log_scale;
  out.F_scaled = p.F_scaled;
  out.dF_scaled = p.dF_scaled;
  const double scale = std::exp(p.log_scale);
  out.F = scale * p.F_scaled;
  out.dF = scale * p.dF_scaled;
  return out;
}

bool agrees(const ScaledPair& coarse, const ScaledPair& fine, double tol) {
  // Bring the coarse result onto the finer shift (S is a grid max, so the
  // finer level's shift is never smaller on nested grids).
  const double r = std::exp(coarse.log_scale - fine.log_scale);
  const double f_prev = coarse.F_scaled * r;
  const double df_prev = coarse.dF_scaled * r;
  const double denom = std::max(
      {fine.F_scaled, std::abs(fine.dF_scaled), 1e-300});
  return std::abs(fine.F_scaled - f_prev) <= tol * denom &&
         std::abs(fine.dF_scaled - df_prev) <= tol * denom;
}

}  // namespace

void QuadratureSpec::validate() const {
  if (nodes < 2) throw UsageError("QuadratureSpec: nodes must be >= 2");
  if (rule == QuadratureRule::trapezoid && half_width < 8.0)
    throw UsageError(
        "QuadratureSpec: trapezoid window must cover >= 8 sigmas");
  if (tol <= 0.0) throw UsageError("QuadratureSpec: tol must be > 0");
  if (max_refinements < 1)
    throw UsageError("QuadratureSpec: max_refinements must be >= 1");
}

ScalarFn1D as_scalar_fn(const Objective& objective) {
  if (objective.dim() != 1)
    throw UsageError("as_scalar_fn: objective must be 1-dimensional");
  const ScalarFn fn = objective.raw_fn();
  return [fn](double x) { return fn(Vector{x}); };
}

GaussHermiteRule gauss_hermite_rule(int n) {
  if (n < 1) throw UsageError("gauss_hermite_rule: n must be >= 1");
  std::vector<double> diag(n, 0.0);
  std::vector<double> off(n > 1 ? n - 1 : 0);
  for (int i = 0; i + 1 < n; ++i)
    off[i] = std::sqrt(0.5 * static_cast<double>(i + 1));
  std::vector<double> z(n, 0.0);
  z[0] = 1.0;
  if (n > 1) tridiag_ql(diag, off, z);

  GaussHermiteRule rule;
  rule.nodes = diag;
  rule.weights.resize(n);
  const double total = std::sqrt(std::numbers::pi);
  for (int i = 0; i < n; ++i) rule.weights[i] = total * z[i] * z[i];
  return rule;
}

SurrogateEval surrogate_quadrature(const ScalarFn1D& f, double mu,
                                   double sigma, double N,
                                   const QuadratureSpec& spec) {
  spec.validate();
  if (!f) throw UsageError("surrogate_quadrature: missing function");
  if (sigma <= 0.0) throw UsageError("surrogate_quadrature: sigma must be > 0");
  if (N <= 0.0) throw UsageError("surrogate_quadrature: N must be > 0");

  if (spec.rule == QuadratureRule::gauss_hermite) {
    ScaledPair prev = gh_eval(f, mu, sigma, N, spec.nodes);
    int n = spec.nodes;
    for (int level = 0; level < spec.max_refinements; ++level) {
      n *= 2;
      const ScaledPair cur = gh_eval(f, mu, sigma, N, n);
      if (agrees(prev, cur, spec.tol)) return finish(cur);
      prev = cur;
    }
    throw OracleError(
        "surrogate_quadrature: gauss_hermite refinement did not converge "
        "(sharply peaked integrand? use the trapezoid rule)");
  }

  int panels = spec.nodes;
  ScaledPair prev = trapezoid_eval(f, mu, sigma, N, spec.half_width, panels);
  for (int level = 0; level < spec.max_refinements; ++level) {
    panels *= 2;
    const ScaledPair cur =
        trapezoid_eval(f, mu, sigma, N, spec.half_width, panels);
    if (agrees(prev, cur, spec.tol)) return finish(cur);
    prev = cur;
  }
  throw OracleError(
      "surrogate_quadrature: trapezoid refinement did not converge at " +
      std::to_string(panels) + " panels");
}

SignConditionReport sign_condition_report(const ScalarFn1D& f, double x_star,
                                          double N, double sigma,
                                          double delta, double M,
                                          double grid_step,
                                          const QuadratureSpec& spec) {
  if (delta <= 0.0 || M <= 0.0 || grid_step <= 0.0)
    throw UsageError("sign_condition_report: delta, M, grid_step must be > 0");

  SignConditionReport report;
  report.N = N;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (double mu = -M + grid_step; mu < M - 0.5 * grid_step;
       mu += grid_step) {
    if (std::abs(mu - x_star) <= delta) continue;
    const SurrogateEval eval = surrogate_quadrature(f, mu, sigma, N, spec);
    // Signed margin: positive iff the sign condition holds at mu.
    const double margin =
        mu > x_star ? -eval.dF_scaled : eval.dF_scaled;
    ++report.points_checked;
    if (margin > 0.0) {
      ++report.points_passed;
    } else if (margin < worst_margin) {
      worst_margin = margin;
      report.worst_mu = mu;
    }
  }
  if (report.points_checked == 0)
    throw UsageError("sign_condition_report: empty grid");
  report.fraction = static_cast<double>(report.points_passed) /
                    static_cast<double>(report.points_checked);
  return report;
}

PowerSearchResult find_minimal_power(const ScalarFn1D& f, double x_star,
                                     double sigma, double delta, double M,
                                     double grid_step, double N_start,
                                     double N_cap, double rel_tol,
                                     const QuadratureSpec& spec) {
  if (N_start <= 0.0 || N_cap <= N_start)
    throw UsageError("find_minimal_power: need 0 < N_start < N_cap");

  PowerSearchResult result;
  double lo = 0.0;  // highest known failing N (0 = none yet)
  double n = N_start;
  while (true) {
    const SignConditionReport report =
        sign_condition_report(f, x_star, n, sigma, delta, M, grid_step, spec);
    result.ladder.push_back(report);
    if (report.fraction >= 1.0) break;
    lo = n;
    n *= 2.0;
    if (n > N_cap)
      throw OracleError("find_minimal_power: no passing N below the cap");
  }

  if (lo == 0.0) {
    // Passed at the search floor already.
    result.minimal_N = n;
    return result;
  }

  double hi = n;
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    const SignConditionReport report = sign_condition_report(
        f, x_star, mid, sigma, delta, M, grid_step, spec);
    (report.fraction >= 1.0 ? hi : lo) = mid;
  }
  result.minimal_N = hi;
  return result;
}

std::vector<LandscapeRow> landscape_curves(const ScalarFn1D& f, double N,
                                           const std::vector<double>& sigmas,
                                           const std::vector<double>& mu_grid,
                                           const QuadratureSpec& spec) {
  if (sigmas.empty() || mu_grid.empty())
    throw UsageError("landscape_curves: sigmas and mu_grid must be non-empty");
  std::vector<LandscapeRow> rows;
  rows.reserve(sigmas.size() * mu_grid.size());
  for (double sigma : sigmas)
    for (double mu : mu_grid) {
      const SurrogateEval eval = surrogate_quadrature(f, mu, sigma, N, spec);
      rows.push_back({sigma, mu, eval.F, eval.dF});
    }
  return rows;
}

void write_landscape_csv(std::ostream& out,
                         const std::vector<LandscapeRow>& rows) {
  out << "sigma,mu,F,dF\n";
  out.precision(17);
  for (const LandscapeRow& r : rows)
    out << r.sigma << ',' << r.mu << ',' << r.F << ',' << r.dF << '\n';
}

double zeta(double s) {
  if (s <= 1.0) throw UsageError("zeta: s must be > 1");
  // Euler-Maclaurin with Bernoulli corrections through B4; for s in the
  // range used here (1 < s < 2) the truncation error is far below 1e-10.
  constexpr int M = 10000;
  double acc = 0.0;
  for (int t = 1; t < M; ++t) acc += std::pow(static_cast<double>(t), -s);
  const double m = static_cast<double>(M);
  acc += std::pow(m, 1.0 - s) / (s - 1.0);
  acc += 0.5 * std::pow(m, -s);
  acc += s * std::pow(m, -s - 1.0) / 12.0;
  acc -= s * (s + 1.0) * (s + 2.0) * std::pow(m, -s - 3.0) / 720.0;
  return acc;
}

TheoryConstants theory_constants(int d, double sigma, double N, double f_star,
                                 double L_f, double b, double gamma,
                                 double eps, double F0) {
  if (d < 1) throw UsageError("theory_constants: d must be >= 1");
  if (sigma <= 0.0) throw UsageError("theory_constants: sigma must be > 0");
  if (N <= 0.0) throw UsageError("theory_constants: N must be > 0");
  if (L_f <= 0.0) throw UsageError("theory_constants: L_f must be > 0");
  if (b <= 0.0)
    throw UsageError("theory_constants: the floor b must be > 0 (it divides)");
  if (gamma <= 0.0 || gamma >= 0.5)
    throw UsageError("theory_constants: gamma must lie in (0, 1/2)");
  if (eps <= 0.0) throw UsageError("theory_constants: eps must be > 0");

  TheoryConstants out;
  const double dd = static_cast<double>(d);
  const double f_n = std::exp(N * f_star);

  out.L = 2.0 * dd * f_n / (sigma * sigma);
  out.G = dd * sigma * sigma * std::exp(2.0 * N * f_star);
  out.zeta_tail = zeta(1.0 + 2.0 * gamma);

  const double common =
      f_n - F0 + std::numbers::sqrt2 * sigma * N * f_n * L_f;
  const double tail3 = f_n * f_n * f_n * out.zeta_tail;
  out.c0 = common + 2.0 * tail3;
  out.c0_dim_sq = common + 2.0 * dd * dd * tail3;

  const double shrink = 1.0 - 2.0 * gamma;
  const double exponent = 2.0 / shrink;
  auto chain = [&](double c0, double& c1, double& c2, double& t_bound) {
    c1 = c0 * shrink / (b * b);
    c2 = std::max(1.0, 1.0 / c1);
    t_bound = std::pow(c2 * c1 * dd * dd / eps, exponent);
  };
  chain(out.c0, out.c1, out.c2, out.t_bound);
  chain(out.c0_dim_sq, out.c1_dim_sq, out.c2_dim_sq, out.t_bound_dim_sq);
  return out;
}

}  // namespace powerhp
