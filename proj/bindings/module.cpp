#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "powerhp/analysis.hpp"
#include "powerhp/attack.hpp"
#include "powerhp/estimator.hpp"
#include "powerhp/harness.hpp"
#include "powerhp/objectives.hpp"
#include "powerhp/optimizers.hpp"

namespace py = pybind11;
using namespace powerhp;

namespace {

Vector to_vector(const std::vector<double>& xs) { return Vector(xs); }

std::vector<double> from_vector(const Vector& v) {
  return {v.begin(), v.end()};
}

py::dict estimate_dict(const GradientEstimate& est) {
  py::dict d;
  d["raw"] = from_vector(est.raw);
  d["norm"] = est.norm;
  d["degenerate"] = est.degenerate;
  if (est.normalized)
    d["normalized"] = from_vector(*est.normalized);
  else
    d["normalized"] = py::none();
  d["shift_used"] = est.shift_used;
  d["samples_used"] = est.samples_used;
  return d;
}

py::dict record_dict(const TrialRecord& rec) {
  py::dict d;
  d["best_mu"] = from_vector(rec.best_mu);
  d["best_f"] = rec.best_f;
  d["t_star"] = rec.t_star;
  if (rec.best_sample.dim() > 0)
    d["best_sample"] = from_vector(rec.best_sample);
  else
    d["best_sample"] = py::none();
  d["best_sample_f"] = rec.best_sample_f;
  d["queries"] = rec.queries;
  d["aborted"] = rec.aborted;
  d["abort_reason"] = rec.abort_reason;
  py::list digest;
  for (const DigestRow& row : rec.digest) {
    py::dict r;
    r["t"] = row.t;
    r["f_mu"] = row.f_mu;
    r["sigma"] = row.sigma;
    r["grad_norm"] = row.grad_norm;
    digest.append(r);
  }
  d["digest"] = digest;
  return d;
}

PowerTransform transform_for(std::optional<double> N, bool shift) {
  if (!N) return PowerTransform::identity();
  return PowerTransform::power(
      *N, shift ? ShiftMode::subtract_reference : ShiftMode::none);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Zeroth-order optimization via power-transformed Gaussian smoothing: "
      "objectives, gradient estimation, optimizer runs, and analysis "
      "oracles";

  py::class_<Objective>(m, "Objective")
      .def_property_readonly("name", &Objective::name)
      .def_property_readonly("dim", &Objective::dim)
      .def_property_readonly("query_count", &Objective::query_count)
      .def_property_readonly("known_maximizer",
                             [](const Objective& o)
                                 -> std::optional<std::vector<double>> {
                               if (!o.known_maximizer()) return std::nullopt;
                               return from_vector(*o.known_maximizer());
                             })
      .def("reset_query_count", &Objective::reset_query_count)
      .def(
          "eval",
          [](Objective& o, const std::vector<double>& x) {
            return o.eval(to_vector(x));
          },
          py::arg("x"))
      .def("__call__",
           [](Objective& o, const std::vector<double>& x) {
             return o.eval(to_vector(x));
           })
      .def("__repr__", [](const Objective& o) {
        return "<Objective " + o.name() + " dim=" + std::to_string(o.dim()) +
               ">";
      });

  m.def("objective_names", &objective_names,
        "Names accepted by make_objective");

  m.def(
      "make_objective",
      [](const std::string& name, int dim,
         std::optional<std::vector<double>> m1,
         std::optional<std::vector<double>> m2) {
        BenchmarkSpec spec;
        spec.name = name;
        spec.dim = dim;
        if (m1) spec.m1 = to_vector(*m1);
        if (m2) spec.m2 = to_vector(*m2);
        return make_objective(spec);
      },
      py::arg("name"), py::arg("dim"), py::arg("m1") = py::none(),
      py::arg("m2") = py::none());

  m.def(
      "estimate_gradient",
      [](Objective& objective, const std::vector<double>& mu, double sigma,
         int K, std::uint64_t seed, std::optional<double> N, bool shift) {
        SeededRng rng(seed);
        const GradientEstimate est = estimate_gradient(
            objective, to_vector(mu), sigma, transform_for(N, shift), K, rng);
        return estimate_dict(est);
      },
      py::arg("objective"), py::arg("mu"), py::arg("sigma"), py::arg("K"),
      py::arg("seed"), py::arg("N") = py::none(), py::arg("shift") = true,
      "Monte-Carlo estimate of sigma^2 grad F at mu; returns the raw "
      "estimate, its norm, and the normalized direction");

  m.def(
      "surrogate_value",
      [](Objective& objective, const std::vector<double>& mu, double sigma,
         int K, std::uint64_t seed, std::optional<double> N, bool shift) {
        SeededRng rng(seed);
        return surrogate_value(objective, to_vector(mu), sigma,
                               transform_for(N, shift), K, rng);
      },
      py::arg("objective"), py::arg("mu"), py::arg("sigma"), py::arg("K"),
      py::arg("seed"), py::arg("N") = py::none(), py::arg("shift") = false);

  m.def(
      "run_trial",
      [](const std::string& config_json, int index) {
        const ExperimentConfig cfg = parse_experiment_config(config_json);
        const TrialRow row = run_single_trial(cfg, index);
        py::dict d;
        d["trial"] = row.trial;
        d["aborted"] = row.aborted;
        d["f_best"] = row.f_best;
        d["mse"] = row.mse;
        d["t_star"] = row.t_star;
        d["queries"] = row.queries;
        d["record"] = record_dict(row.record);
        return d;
      },
      py::arg("config_json"), py::arg("index"),
      "Replay a single experiment trial from a JSON config string");

  m.def(
      "run_experiment",
      [](const std::string& config_json) {
        const ExperimentConfig cfg = parse_experiment_config(config_json);
        const ExperimentResult result = run_experiment(cfg);
        py::dict d;
        d["trials_csv"] = trials_csv(result);
        d["aggregate_json"] = aggregate_json(result);
        return d;
      },
      py::arg("config_json"),
      "Run a full experiment from a JSON config string; returns the trial "
      "CSV and aggregate JSON as text");

  m.def(
      "run_attack_suite",
      [](const std::string& config_json) {
        const AttackSuiteConfig cfg = parse_attack_config(config_json);
        return attack_report_json(run_attack_suite(cfg));
      },
      py::arg("config_json"),
      "Run the toy targeted-attack suite; returns the report JSON as text");

  m.def(
      "surrogate_quadrature",
      [](Objective& objective, double mu, double sigma, double N,
         const std::string& rule) {
        QuadratureSpec spec;
        if (rule == "trapezoid") {
          spec.rule = QuadratureRule::trapezoid;
          spec.nodes = 256;
        }
        const SurrogateEval eval =
            surrogate_quadrature(as_scalar_fn(objective), mu, sigma, N, spec);
        py::dict d;
        d["F"] = eval.F;
        d["dF"] = eval.dF;
        d["log_scale"] = eval.log_scale;
        d["F_scaled"] = eval.F_scaled;
        d["dF_scaled"] = eval.dF_scaled;
        return d;
      },
      py::arg("objective"), py::arg("mu"), py::arg("sigma"), py::arg("N"),
      py::arg("rule") = "gauss_hermite",
      "Deterministic quadrature of the smoothed surrogate of a 1D objective");

  m.def(
      "find_minimal_power",
      [](Objective& objective, double x_star, double sigma, double delta,
         double M, double grid_step, const std::string& rule) {
        QuadratureSpec spec;
        if (rule == "trapezoid") {
          spec.rule = QuadratureRule::trapezoid;
          spec.nodes = 256;
        }
        const PowerSearchResult result =
            find_minimal_power(as_scalar_fn(objective), x_star, sigma, delta,
                               M, grid_step, 0.01, 1e6, 0.01, spec);
        py::list ladder;
        for (const SignConditionReport& r : result.ladder) {
          py::dict row;
          row["N"] = r.N;
          row["fraction"] = r.fraction;
          ladder.append(row);
        }
        py::dict d;
        d["minimal_N"] = result.minimal_N;
        d["ladder"] = ladder;
        return d;
      },
      py::arg("objective"), py::arg("x_star"), py::arg("sigma") = 1.0,
      py::arg("delta") = 0.1, py::arg("M") = 3.0, py::arg("grid_step") = 0.1,
      py::arg("rule") = "trapezoid");

  m.def(
      "theory_constants",
      [](int d, double sigma, double N, double f_star, double L_f, double b,
         double gamma, double eps, double F0) {
        const TheoryConstants tc =
            theory_constants(d, sigma, N, f_star, L_f, b, gamma, eps, F0);
        py::dict out;
        out["L"] = tc.L;
        out["G"] = tc.G;
        out["zeta_tail"] = tc.zeta_tail;
        out["c0"] = tc.c0;
        out["c1"] = tc.c1;
        out["c2"] = tc.c2;
        out["t_bound"] = tc.t_bound;
        out["c0_dim_sq"] = tc.c0_dim_sq;
        out["c1_dim_sq"] = tc.c1_dim_sq;
        out["c2_dim_sq"] = tc.c2_dim_sq;
        out["t_bound_dim_sq"] = tc.t_bound_dim_sq;
        return out;
      },
      py::arg("d"), py::arg("sigma"), py::arg("N"), py::arg("f_star"),
      py::arg("L_f"), py::arg("b"), py::arg("gamma"), py::arg("eps"),
      py::arg("F0"));

  m.def("zeta", &zeta, py::arg("s"),
        "Riemann zeta for s > 1 (Euler-Maclaurin, abs error <= 1e-10)");
}
