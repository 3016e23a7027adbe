"""Zeroth-order optimization via power-transformed Gaussian smoothing.

Thin wrapper over the C++ core: benchmark objectives, the Monte-Carlo
gradient estimator, full experiment runs driven by JSON configs, the toy
targeted-attack suite, and the quadrature/theory analysis oracles.
"""

from powerhp._core import (
    Objective,
    estimate_gradient,
    find_minimal_power,
    make_objective,
    objective_names,
    run_attack_suite,
    run_experiment,
    run_trial,
    surrogate_quadrature,
    surrogate_value,
    theory_constants,
    zeta,
)

__all__ = [
    "Objective",
    "estimate_gradient",
    "find_minimal_power",
    "make_objective",
    "objective_names",
    "run_attack_suite",
    "run_experiment",
    "run_trial",
    "surrogate_quadrature",
    "surrogate_value",
    "theory_constants",
    "zeta",
]
