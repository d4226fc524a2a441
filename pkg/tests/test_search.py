from __future__ import annotations

import numpy as np
import pytest

from curvlab.errors import SweepConfigError
from curvlab.search import (
    SweepSpec,
    basis_images,
    float_curvature,
    pfaffians,
    run_sweep,
    shape_operator,
    sweep_config,
    theorem_search,
)
from curvlab.tensors import rank

SMALL = {"lambda1": [-1, 0, 1], "lambda2": [0, 1], "gamma": [-1, 2], "signs": [1, -1],
         "omega": [-1, 0, 1], "diagonal": [0, 1], "k_max": 2}


def test_single_point_rank_one():
    spec = SweepSpec.from_json({"lambda1": [0], "lambda2": [0], "gamma": [1], "signs": [1],
                                "omega": {"points": [[1, 0, 0, 0, 0, 1]]}, "diagonal": False, "k_max": 3})
    summary = run_sweep(spec)
    (row,) = summary["table"]
    assert row["rank"] == 1 and row["in_locus"] and not summary["violators"]


def test_t2_excludes_point_from_locus():
    spec = SweepSpec.from_json({"lambda1": [1], "lambda2": [0], "gamma": [1], "signs": [1],
                                "omega": {"points": [[1, 0, 0, 0, 0, 1]]}, "diagonal": False, "k_max": 3})
    (row,) = run_sweep(spec)["table"]
    assert row["in_locus"] == [] and row["rank"] == 2


def test_degenerate_omega_rejected():
    spec = SweepSpec.from_json({"lambda1": [1], "lambda2": [0], "gamma": [1], "signs": [1],
                                "omega": {"points": [[1, 0, 0, 1, 1, 0]]}, "diagonal": False, "k_max": 1})
    (row,) = run_sweep(spec)["table"]
    assert row["degenerate"] and row["in_locus"] == []


@pytest.mark.parametrize("doc, message", [
    ({"tolerance": 10}, "tolerance exceeds signal"),
    ({"lambda1": [], "diagonal": False}, "selects no points"),
    ({"diagonal": False, "omega": {"points": []}}, "selects no points"),
    ({"gamma": [0, 1]}, "exclude 0"),
    ({"k_max": 0}, "k-max"),
    ({"k_max": 4}, "k-max <= 3"),
    ({"bogus": 1}, "unknown keys"),
])
def test_sweep_config_errors(doc, message):
    with pytest.raises(SweepConfigError, match=message):
        SweepSpec.from_json(doc)


def test_gamma_range_is_clamped():
    spec = SweepSpec.from_json({"gamma": {"min": -1, "max": 1, "step": 0.5}})
    assert 0.0 not in spec.gamma and spec.clamped_gamma == (0.0,)
    assert min(abs(g) for g in spec.gamma) >= 0.5


def test_gram_screen_agrees_with_brute_force():
    spec = SweepSpec.from_json(SMALL)
    W = np.array(spec.omegas(), dtype=float)
    for family, params in spec.configs():
        res = sweep_config(family, params, W, spec.k_max, spec.tolerance)
        Ms = basis_images(float_curvature(shape_operator(family, params)), spec.k_max)
        ok = np.abs(pfaffians(W)) > spec.tolerance
        for k, M in enumerate(Ms):
            brute = ok & (np.abs(M @ W.T).max(axis=0) <= spec.tolerance)
            assert res.locus[k] == int(brute.sum())


def test_rank_of_shape_operators():
    assert rank(tuple(map(tuple, shape_operator("block", {"l1": 0, "l2": 0, "gamma": 2, "s": -1})))) == 1
    assert rank(tuple(map(tuple, shape_operator("diagonal", {"l1": 1, "l2": 1, "l3": 0, "l4": 2})))) == 3


def test_theorem_search_sound_and_deterministic():
    spec = SweepSpec.from_json(SMALL)
    first = theorem_search(spec, symbolic_k_max=3)
    assert all(r.passed for r in first)
    numeric = first[-1]
    assert numeric.details["violators"] == []
    assert numeric.details["points"] == spec.n_configs * 3**6
    second = theorem_search(spec, symbolic_k_max=3, parallelism=2)
    assert [r.to_json(timing=False) for r in first] == [r.to_json(timing=False) for r in second]


def test_violator_would_be_reported():
    # a rank-2 diagonal S with the full grid must never be in the locus; force tol huge relative to data
    spec = SweepSpec.from_json({"lambda1": [0], "lambda2": [0], "gamma": [1], "signs": [1],
                                "omega": {"points": [[1, 0, 0, 0, 0, 1]]}, "diagonal": [0, 1], "k_max": 1})
    res = sweep_config("diagonal", {"l1": 1, "l2": 1, "l3": 0, "l4": 0},
                       np.array([[1.0, 0, 0, 0, 0, 1.0]]), 1, 1e-9)
    # R.omega != 0 here, so no violator even though rank is 2
    assert res.rank == 2 and res.violators == []
    assert spec.n_configs == 1 + 16
