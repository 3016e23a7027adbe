"""End-to-end smoke tests for the python bindings."""

import json
import math

import pytest

import powerhp

EXPERIMENT = json.dumps(
    {
        "label": "py_smoke",
        "objective": {"name": "two_log", "dim": 2},
        "method": "gs_powerhp",
        "optimizer": {
            "N": 1.0,
            "T": 50,
            "K": 5,
            "sigma": {
                "kind": "geometric_decay",
                "sigma0": 2.0,
                "b": 0.05,
                "beta": 0.97,
            },
            "lr": {"kind": "constant", "alpha": 0.1},
        },
        "trials": 4,
        "master_seed": 13,
        "threads": 2,
    }
)


def test_objective_roundtrip():
    assert "sphere" in powerhp.objective_names()
    sphere = powerhp.make_objective("sphere", 2)
    assert sphere.dim == 2
    assert sphere.eval([1.0, 2.0]) == -5.0
    assert sphere([0.0, 0.0]) == 0.0
    assert sphere.query_count == 2
    assert sphere.known_maximizer == [0.0, 0.0]
    with pytest.raises(ValueError):
        sphere.eval([1.0])
    with pytest.raises(RuntimeError):
        powerhp.make_objective("nope", 2)


def test_estimator_determinism_and_direction():
    obj = powerhp.make_objective("sphere", 3)
    a = powerhp.estimate_gradient(obj, [1.0, 0.0, 0.0], 0.5, 64, seed=9, N=1.0)
    b = powerhp.estimate_gradient(obj, [1.0, 0.0, 0.0], 0.5, 64, seed=9, N=1.0)
    assert a["raw"] == b["raw"]
    assert a["samples_used"] == 64
    assert not a["degenerate"]
    # The surrogate gradient at (1,0,0) points back toward the origin.
    assert a["normalized"][0] < 0.0
    norm = math.sqrt(sum(v * v for v in a["normalized"]))
    assert norm == pytest.approx(1.0, abs=1e-12)


def test_quadrature_matches_closed_form():
    obj = powerhp.make_objective("sphere", 1)
    out = powerhp.surrogate_quadrature(obj, 0.0, 1.0, 1.0)
    assert out["F"] == pytest.approx(1.0 / math.sqrt(3.0), rel=1e-8)
    assert out["dF"] == pytest.approx(0.0, abs=1e-10)


def test_experiment_runs_and_replays():
    result = powerhp.run_experiment(EXPERIMENT)
    assert result["trials_csv"].startswith("trial,f_best,mse,t_star,queries\n")
    assert len(result["trials_csv"].strip().splitlines()) == 5

    aggregate = json.loads(result["aggregate_json"])
    assert aggregate["label"] == "py_smoke"
    assert aggregate["trials"] == 4
    assert aggregate["aborted"] == 0
    assert aggregate["stats"]["mean_queries"] == 50 * 6

    again = powerhp.run_experiment(EXPERIMENT)
    assert again["trials_csv"] == result["trials_csv"]

    row = powerhp.run_trial(EXPERIMENT, 2)
    line = result["trials_csv"].splitlines()[3]
    assert line.startswith("2,")
    assert f'{row["f_best"]:.17g}' in line


def test_bad_config_raises():
    with pytest.raises(RuntimeError):
        powerhp.run_experiment("{not json")


def test_theory_constants():
    tc = powerhp.theory_constants(
        d=1, sigma=1.0, N=1.0, f_star=0.0, L_f=1.0, b=0.1, gamma=0.25,
        eps=0.01, F0=0.0
    )
    assert tc["L"] == pytest.approx(2.0)
    assert tc["G"] == pytest.approx(1.0)
    assert powerhp.zeta(1.5) == pytest.approx(2.6123753486854883, abs=1e-10)
