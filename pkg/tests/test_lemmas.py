from __future__ import annotations

import json
import random
from fractions import Fraction

import pytest

from curvlab import lemmas
from curvlab.curvature import E1, E3, E4, QuantityEvaluator
from curvlab.lemmas import CHECKS, LemmaReport, SuiteConfig, run_check
from curvlab.scalars import Polynomial
from curvlab.tensors import canonical_form_b, omega_from_entries


def test_report_verdict_matches_residuals():
    r = LemmaReport("demo")
    r.add("zero", Fraction(0))
    r.add("zero poly", Polynomial.zero(("a",)))
    assert r.verdict == "pass" and r.mode == "exact"
    r.add("tiny float", 1e-12)
    assert r.verdict == "pass" and r.mode == "mixed"
    r.add("nonzero", Polynomial.generator("a"))
    assert r.verdict == "fail"
    assert [d for d, _ in r.failures] == ["nonzero"]


def test_report_json_shape():
    r = LemmaReport("demo", {"k": 2})
    r.add("x", Fraction(0))
    doc = r.to_json()
    assert set(doc) >= {"lemma", "params", "mode", "verdict", "residuals", "ms"}
    assert r.to_json(timing=False)["ms"] is None
    json.dumps(doc)


def test_registry_has_nine_checks():
    assert len(CHECKS) == 9
    assert "theorem-search" in CHECKS


@pytest.mark.parametrize("s", [1, -1])
def test_abcd_both_signs(s):
    (report,) = lemmas.check_abcd(4, s)
    assert report.passed and report.params["s"] == s


def test_eki_domain_counts():
    (report,) = lemmas.check_eki(3, 1)
    assert report.passed
    # k=2: i in {3}; k=3: i in {3, 4}; 9 argument pairs each
    assert sum(1 for d, _ in report.residuals if "(S e" not in d and "base" not in d) == 9 * 3


def test_det_formulas_small():
    (report,) = lemmas.check_det_formulas(2)
    assert report.passed and len(report.residuals) == 2 * 6


def test_t_family_and_closed_forms():
    for s in (1, -1):
        assert lemmas.check_t_family(4, s)[0].passed
        assert lemmas.check_akck_and_closed_forms(5, s)[0].passed


def test_basis_change_lemma_points():
    (report,) = lemmas.check_basis_change_lemma(samples=20, seed=3)
    assert report.passed
    pyth = [p for p in report.details["exact_points"] if p["path"] == "P"]
    assert len(pyth) >= 5
    assert report.details["float_points"] >= 20


def test_nabla_corollary_informational_guard():
    (report,) = lemmas.check_nabla_corollary(trials=2, seed=1)
    assert report.passed
    info = report.details["informational"]["flat connection, T = x1^2 dx1 (x) dx2"]
    assert info == {"nabla2_nonzero": True, "RT_nonzero": False}


def test_theorem_symbolic_chain():
    for s in (1, -1):
        report = lemmas.theorem_symbolic(4, s)
        assert report.passed
        assert len(report.details["steps"]) == 3


def test_run_check_unknown():
    with pytest.raises(KeyError):
        run_check("no-such-check")


def test_run_check_sign_selection():
    reports = run_check("check-abcd", SuiteConfig(k_max=2, signs=(-1,)))
    assert [r.params["s"] for r in reports] == [-1]


@pytest.mark.parametrize("s", [1, -1])
def test_symbolic_matches_float_pipeline(s):
    """Evaluating symbolic quantities at a point agrees with the float engine."""
    rng = random.Random(s)
    sym = QuantityEvaluator(canonical_form_b(s=s))
    point = {"l1": Fraction(rng.randint(-5, 5), 3), "l2": Fraction(2, 7), "gamma": Fraction(rng.randint(1, 4), 5)}
    w = {n: Fraction(rng.randint(-3, 3), 2) for n in ("w12", "w13", "w14", "w23", "w24", "w34")}
    w["w12"] += 5
    w["w34"] = Fraction(abs(w["w34"]) + 3)  # keeps the pfaffian away from 0
    point.update(w)
    num = QuantityEvaluator(canonical_form_b(float(point["l1"]), float(point["l2"]), float(point["gamma"]), s=s,
                                             omega=omega_from_entries({n: float(v) for n, v in w.items()})))
    for k in range(1, 5):
        for getter in ("A", "B", "C", "D"):
            exact = getattr(sym, getter)(k).evaluate(point)
            assert abs(float(exact) - getattr(num, getter)(k)) <= 1e-9
        exact = sym.T(k, 0, 0, k - 1, E3, E3).evaluate(point)
        assert abs(float(exact) - num.T(k, 0, 0, k - 1, E3, E3)) <= 1e-9
        exact = sym.E(k, 1, E1, E4).evaluate(point)
        assert abs(float(exact) - num.E(k, 1, E1, E4)) <= 1e-9
