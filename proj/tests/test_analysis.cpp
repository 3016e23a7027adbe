#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "powerhp/analysis.hpp"
#include "powerhp/errors.hpp"
#include "powerhp/objectives.hpp"

using namespace powerhp;

namespace {

double sphere1d(double x) { return -x * x; }

// 1D analogue of the two-peak benchmark: a sharp global peak at -0.5 and
// a blunter local one at +0.5.
double two_peak(double x) {
  const double a = x + 0.5;
  const double b = x - 0.5;
  return -std::log(a * a + 1e-5) - std::log(b * b + 1e-2);
}

QuadratureSpec trapezoid_spec() {
  QuadratureSpec spec;
  spec.rule = QuadratureRule::trapezoid;
  spec.nodes = 256;
  return spec;
}

}  // namespace

TEST_CASE("gauss-hermite rule integrates monomials exactly") {
  for (int n : {1, 2, 5, 10, 25}) {
    const GaussHermiteRule rule = gauss_hermite_rule(n);
    REQUIRE(rule.nodes.size() == static_cast<std::size_t>(n));
    REQUIRE(rule.weights.size() == static_cast<std::size_t>(n));

    // Moments of exp(-z^2): sqrt(pi) * (2j-1)!! / 2^j for degree 2j,
    // zero for odd degrees. Exact through degree 2n - 1.
    double moment = std::sqrt(std::numbers::pi);
    for (int degree = 0; degree <= 2 * n - 1; ++degree) {
      double got = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        got += rule.weights[i] * std::pow(rule.nodes[i], degree);
      if (degree % 2 == 1) {
        CHECK(std::abs(got) < 1e-10 * moment);
      } else {
        if (degree > 0) moment *= (degree - 1) / 2.0;
        CHECK(got == doctest::Approx(moment).epsilon(1e-12));
      }
    }
  }
  CHECK_THROWS_AS(gauss_hermite_rule(0), UsageError);
}

TEST_CASE("quadrature matches the closed-form smoothed sphere") {
  for (double mu : {-1.0, 0.0, 0.5, 2.0}) {
    for (double sigma : {0.3, 1.0, 3.0}) {
      for (double N : {0.5, 1.0, 2.0}) {
        const SurrogateEval got = surrogate_quadrature(sphere1d, mu, sigma, N);
        CHECK(got.F == doctest::Approx(test_oracle::sphere_surrogate(
                                           mu, sigma, N))
                           .epsilon(1e-8));
        CHECK(got.dF == doctest::Approx(test_oracle::sphere_surrogate_grad(
                                            mu, sigma, N))
                            .epsilon(1e-8)
                            .scale(1.0));
      }
    }
  }
}

TEST_CASE("trapezoid rule agrees with gauss-hermite on the sphere") {
  const QuadratureSpec trap = trapezoid_spec();
  for (double mu : {0.0, 0.7, -1.3}) {
    const SurrogateEval gh = surrogate_quadrature(sphere1d, mu, 1.0, 1.0);
    const SurrogateEval tz = surrogate_quadrature(sphere1d, mu, 1.0, 1.0, trap);
    CHECK(tz.F == doctest::Approx(gh.F).epsilon(1e-7));
    CHECK(tz.dF == doctest::Approx(gh.dF).epsilon(1e-7).scale(1.0));
  }
}

TEST_CASE("constant objective has flat surrogate") {
  const auto constant = [](double) { return 0.0; };
  for (double mu : {-5.0, 0.0, 3.0}) {
    const SurrogateEval e = surrogate_quadrature(constant, mu, 0.7, 2.0);
    CHECK(e.F == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(e.dF) < 1e-10);
  }
}

TEST_CASE("surrogate through the objective adapter skips query counting") {
  BenchmarkSpec spec;
  spec.name = "sphere";
  spec.dim = 1;
  Objective obj = make_objective(spec);
  const ScalarFn1D f = as_scalar_fn(obj);
  const SurrogateEval e = surrogate_quadrature(f, 0.5, 1.0, 1.0);
  CHECK(e.dF ==
        doctest::Approx(test_oracle::sphere_surrogate_grad(0.5, 1.0, 1.0))
            .epsilon(1e-8));
  CHECK(obj.query_count() == 0);

  BenchmarkSpec spec2;
  spec2.name = "sphere";
  spec2.dim = 2;
  Objective obj2 = make_objective(spec2);
  CHECK_THROWS_AS(as_scalar_fn(obj2), UsageError);
}

TEST_CASE("two-peak surrogate handles the sharp spike and vanishes far out") {
  const QuadratureSpec trap = trapezoid_spec();
  const SurrogateEval near = surrogate_quadrature(two_peak, -0.5, 1.0, 1.0,
                                                  trap);
  CHECK(near.F > 1.0);
  CHECK(std::isfinite(near.F));

  const SurrogateEval far = surrogate_quadrature(two_peak, 20.0, 1.0, 1.0,
                                                 trap);
  CHECK(far.F < 1e-4);
  CHECK(far.F > 0.0);
}

TEST_CASE("smoothed sphere gradient is 2/sigma^2-Lipschitz on a dense grid") {
  const QuadratureSpec trap = trapezoid_spec();
  const double L = theory_constants(1, 1.0, 1.0, 0.0, 2.0, 0.1, 0.25,
                                    0.01, 0.0)
                       .L;
  CHECK(L == doctest::Approx(2.0));
  double prev_mu = -3.0;
  double prev_dF = surrogate_quadrature(sphere1d, prev_mu, 1.0, 1.0, trap).dF;
  for (double mu = -2.9; mu <= 3.0; mu += 0.1) {
    const double dF = surrogate_quadrature(sphere1d, mu, 1.0, 1.0, trap).dF;
    CHECK(std::abs(dF - prev_dF) <= L * std::abs(mu - prev_mu) + 1e-9);
    prev_mu = mu;
    prev_dF = dF;
  }
}

TEST_CASE("sign conditions hold on the sphere for any power") {
  const SignConditionReport rep =
      sign_condition_report(sphere1d, 0.0, 0.01, 1.0, 0.1, 3.0, 0.1);
  CHECK(rep.points_checked > 40);
  CHECK(rep.fraction == 1.0);

  const PowerSearchResult search =
      find_minimal_power(sphere1d, 0.0, 1.0, 0.1, 3.0, 0.1);
  CHECK(search.minimal_N == doctest::Approx(0.01));
  REQUIRE_FALSE(search.ladder.empty());
  CHECK(search.ladder.front().fraction == 1.0);
}

TEST_CASE("two-peak objective needs a strictly positive minimal power") {
  const QuadratureSpec trap = trapezoid_spec();
  const SignConditionReport weak =
      sign_condition_report(two_peak, -0.5, 0.01, 1.0, 0.1, 3.0, 0.1, trap);
  CHECK(weak.fraction < 1.0);
  // The violated points sit around the blunt second peak.
  CHECK(weak.worst_mu > -0.45);
  CHECK(weak.worst_mu < 2.0);

  const PowerSearchResult search =
      find_minimal_power(two_peak, -0.5, 1.0, 0.1, 3.0, 0.1, 0.01, 1e6,
                         0.01, trap);
  CHECK(search.minimal_N > 0.01);
  CHECK(search.minimal_N < 100.0);
  double prev = 0.0;
  for (const SignConditionReport& rung : search.ladder) {
    CHECK(rung.fraction >= prev);
    prev = rung.fraction;
  }
  CHECK(search.ladder.back().fraction == 1.0);

  const SignConditionReport at_min = sign_condition_report(
      two_peak, -0.5, search.minimal_N, 1.0, 0.1, 3.0, 0.1, trap);
  CHECK(at_min.fraction == 1.0);
  const SignConditionReport below = sign_condition_report(
      two_peak, -0.5, search.minimal_N / 4.0, 1.0, 0.1, 3.0, 0.1, trap);
  CHECK(below.fraction < 1.0);
}

TEST_CASE("landscape rows cover the grid and serialize with a fixed header") {
  const QuadratureSpec trap = trapezoid_spec();
  const std::vector<double> sigmas{0.5, 1.0};
  const std::vector<double> grid{-1.0, 0.0, 1.0};
  const auto rows = landscape_curves(two_peak, 1.0, sigmas, grid, trap);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].sigma == 0.5);
  CHECK(rows[0].mu == -1.0);
  CHECK(rows[5].sigma == 1.0);
  CHECK(rows[5].mu == 1.0);
  for (const auto& row : rows) CHECK(row.F > 0.0);

  std::ostringstream out;
  write_landscape_csv(out, rows);
  const std::string text = out.str();
  CHECK(text.rfind("sigma,mu,F,dF\n", 0) == 0);
  std::istringstream in(text);
  std::string line;
  int count = 0;
  while (std::getline(in, line)) ++count;
  CHECK(count == 7);
}

TEST_CASE("zeta matches reference values") {
  CHECK(zeta(1.5) == doctest::Approx(2.6123753486854883).epsilon(1e-12));
  CHECK(zeta(2.0) ==
        doctest::Approx(std::numbers::pi * std::numbers::pi / 6.0)
            .epsilon(1e-12));
  CHECK(zeta(4.0) == doctest::Approx(std::pow(std::numbers::pi, 4) / 90.0)
                         .epsilon(1e-12));
  CHECK_THROWS_AS(zeta(1.0), UsageError);
}

TEST_CASE("theory constants match hand substitution") {
  // d=1, sigma=1, N=1, f_star=0: L = 2, G = 1.
  const TheoryConstants tc =
      theory_constants(1, 1.0, 1.0, 0.0, 1.0, 0.1, 0.25, 0.01, 0.0);
  CHECK(tc.L == doctest::Approx(2.0));
  CHECK(tc.G == doctest::Approx(1.0));
  CHECK(tc.zeta_tail == doctest::Approx(zeta(1.5)).epsilon(1e-12));

  // f_N(x*) = e^{N f*} = 1, so C0 = 1 - F0 + 2 zeta(1.5) + sqrt(2) N L_f.
  const double c0_expect = 1.0 + 2.0 * zeta(1.5) + std::numbers::sqrt2;
  CHECK(tc.c0 == doctest::Approx(c0_expect).epsilon(1e-12));
  CHECK(tc.c1 == doctest::Approx(tc.c0 * 0.5 / 0.01).epsilon(1e-12));
  CHECK(tc.c2 == doctest::Approx(std::max(1.0, 1.0 / tc.c1)).epsilon(1e-12));
  CHECK(tc.t_bound ==
        doctest::Approx(std::pow(tc.c2 * tc.c1 / 0.01, 4.0)).epsilon(1e-10));

  // The d^2 variant only changes the tail-sum coefficient.
  CHECK(tc.c0_dim_sq == doctest::Approx(tc.c0));  // d = 1
  const TheoryConstants td =
      theory_constants(3, 1.0, 1.0, 0.0, 1.0, 0.1, 0.25, 0.01, 0.0);
  CHECK(td.c0_dim_sq > td.c0);

  // L and G scale as stated in d and sigma.
  const TheoryConstants ts =
      theory_constants(4, 0.5, 1.0, 0.0, 1.0, 0.1, 0.25, 0.01, 0.0);
  CHECK(ts.L == doctest::Approx(2.0 * 4 / 0.25));
  CHECK(ts.G == doctest::Approx(4 * 0.25));

  CHECK_THROWS_AS(theory_constants(1, 1.0, 1.0, 0.0, 1.0, 0.1, 0.6, 0.01, 0.0),
                  UsageError);
  CHECK_THROWS_AS(theory_constants(1, 1.0, 1.0, 0.0, 1.0, 0.0, 0.25, 0.01, 0.0),
                  UsageError);
}

TEST_CASE("iteration bound is monotone in eps and dimension") {
  const auto bound = [](int d, double eps) {
    return theory_constants(d, 1.0, 1.0, 0.0, 1.0, 0.1, 0.25, eps, 0.0)
        .t_bound;
  };
  CHECK(bound(2, 0.01) > bound(2, 0.1));
  CHECK(bound(2, 0.1) > bound(2, 0.5));
  CHECK(bound(4, 0.01) > bound(2, 0.01));
  CHECK(bound(8, 0.01) > bound(4, 0.01));
}
