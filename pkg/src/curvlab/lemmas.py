"""Executable checks for the curvature identities on Lorentzian 4-manifolds.

Unless noted otherwise every check runs over Q[l1, l2, gamma, w12..w34] on the
block model with alpha = s*gamma, beta = -s*gamma, separately for s = +1 and
s = -1. A check returns :class:`LemmaReport` objects whose residuals must all
be the exact zero for the check to pass.
"""

from __future__ import annotations

import functools
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .curvature import E1, E2, E3, E4, QuantityEvaluator, curvature_action
from .jets import (
    covariant_derivative,
    curvature_at_origin,
    field_from_coefficients,
    make_jet,
    parallel_field_at_origin,
    random_jet,
)
from .scalars import DEFAULT_TOLERANCE, Polynomial, is_zero, scalar_kind, to_json
from .tensors import (
    apply_basis_change,
    apply_scaled_basis_change,
    as_matrix,
    canonical_form_b,
    mat_mul,
    omega_from_entries,
    omega_pfaffian,
    block_basis_change,
    block_scaling,
    symbolic_rank,
)

DEFAULT_K_MAX = 6
SIGNS = (1, -1)


@dataclass
class LemmaReport:
    lemma: str
    params: dict = field(default_factory=dict)
    residuals: list = field(default_factory=list)
    elapsed_ms: float = 0.0
    tolerance: float = DEFAULT_TOLERANCE
    details: dict = field(default_factory=dict)

    def add(self, description: str, value) -> None:
        self.residuals.append((description, value))

    @property
    def mode(self) -> str:
        kinds = {scalar_kind(v) == "float" for _, v in self.residuals}
        if kinds == {True}:
            return "float"
        return "mixed" if len(kinds) == 2 else "exact"

    @property
    def failures(self) -> list:
        return [(d, v) for d, v in self.residuals if not is_zero(v, self.tolerance)]

    @property
    def verdict(self) -> str:
        return "fail" if self.failures else "pass"

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_json(self, timing: bool = True) -> dict:
        return {
            "lemma": self.lemma,
            "params": self.params,
            "mode": self.mode,
            "verdict": self.verdict,
            "residuals": [{"desc": d, "value": to_json(v)} for d, v in self.residuals],
            "ms": round(self.elapsed_ms, 3) if timing else None,
            "details": self.details,
        }


class _timed:
    def __init__(self, report: LemmaReport):
        self.report = report

    def __enter__(self):
        self.start = time.perf_counter()
        return self.report

    def __exit__(self, *exc):
        self.report.elapsed_ms = (time.perf_counter() - self.start) * 1000.0
        return False


@functools.lru_cache(maxsize=None)
def form_b_evaluator(s: int | None) -> QuantityEvaluator:
    """Shared evaluator for the symbolic block model (s=None: free alpha, beta)."""
    return QuantityEvaluator(canonical_form_b(s=s))


def _gens(ev: QuantityEvaluator, *names):
    vs = ev.model.variables
    return [Polynomial.generator(n, vs) for n in names]


# -- determinant formulas and their corollary ----------------------------------------

def _det_slices(ev: QuantityEvaluator, k: int):
    pre = (E3, E4) * (2 * k)
    a = {i: ev.component(pre + (i, E4)) for i in (E1, E2)}
    b = {X: ev.component(pre + (E1, X, E1, X)) for X in (E3, E4)}
    c = {(X, Y): ev.component(pre + (E1, X, E1, Y)) for X, Y in ((E3, E4), (E4, E3))}
    return a, b, c


def check_det_formulas(k_max: int = DEFAULT_K_MAX) -> list:
    report = LemmaReport("check-det-formulas", {"k_max": k_max, "alpha_beta": "free"})
    with _timed(report):
        ev = form_b_evaluator(None)
        alpha, beta, gamma, w14, w24, w34 = _gens(ev, "alpha", "beta", "gamma", "w14", "w24", "w34")
        det = alpha * beta + gamma * gamma
        w_i4 = {E1: w14, E2: w24}
        for k in range(1, k_max + 1):
            a, b, c = _det_slices(ev, k)
            for i in (E1, E2):
                report.add(f"k={k} R^{2 * k}w(e3,e4..,e{i + 1},e4) - det^k w{i + 1}4", a[i] - det**k * w_i4[i])
            for X in (E3, E4):
                report.add(f"k={k} R^{2 * k + 1}w(..,e1,e{X + 1},e1,e{X + 1}) - 4^k gamma det^k w34",
                           b[X] - 4**k * gamma * det**k * w34)
            for (X, Y), val in c.items():
                report.add(f"k={k} R^{2 * k + 1}w(..,e1,e{X + 1},e1,e{Y + 1}) - 2*4^(k-1)(alpha-beta) det^k w34",
                           val - 2 * 4 ** (k - 1) * (alpha - beta) * det**k * w34)
    return [report]


def check_corollary_detzero(k_max: int = DEFAULT_K_MAX) -> list:
    """alpha*beta + gamma^2 = 0 is forced: each slice factors through det^k."""
    report = LemmaReport("check-corollary-detzero", {"k_max": k_max})
    with _timed(report):
        ev = form_b_evaluator(None)
        alpha, beta, gamma, w14, w24, w34 = _gens(ev, "alpha", "beta", "gamma", "w14", "w24", "w34")
        det = alpha * beta + gamma * gamma
        for k in range(1, k_max + 1):
            a, b, _ = _det_slices(ev, k)
            for i, cof in ((E1, w14), (E2, w24)):
                report.add(f"k={k} case a, i={i + 1}: slice - det^k * w{i + 1}4", a[i] - det**k * cof)
                report.add(f"k={k} case a, i={i + 1}: cofactor free of alpha, beta", Fraction(int(cof.involves(("alpha", "beta")))))
            for X in (E3, E4):
                report.add(f"k={k} case b, X=e{X + 1}: slice - 4^k gamma det^k w34", b[X] - 4**k * gamma * det**k * w34)
        # on the variety alpha = s*gamma, beta = -s*gamma the slices vanish identically
        for s in SIGNS:
            spec = form_b_evaluator(s)
            for k in range(1, k_max + 1):
                a, b, _ = _det_slices(spec, k)
                for i in (E1, E2):
                    report.add(f"s={s:+d} k={k} case a, i={i + 1} vanishes", a[i])
                for X in (E3, E4):
                    report.add(f"s={s:+d} k={k} case b, X=e{X + 1} vanishes", b[X])
        numeric = QuantityEvaluator(canonical_form_b(s=None, alpha=2, beta=-2, gamma=2))
        a, b, _ = _det_slices(numeric, 1)
        for i in (E1, E2):
            report.add(f"alpha=2 beta=-2 gamma=2: R^2w(e3,e4,e3,e4,e{i + 1},e4)", a[i])
        for X in (E3, E4):
            report.add(f"alpha=2 beta=-2 gamma=2: R^3w(e3,e4,e3,e4,e1,e{X + 1},e1,e{X + 1})", b[X])
    return [report]


# -- A, B, C, D -------------------------------------------------------------------------

def check_abcd(k_max: int = DEFAULT_K_MAX, s: int = 1) -> list:
    report = LemmaReport("check-abcd", {"k_max": k_max, "s": s})
    with _timed(report):
        ev = form_b_evaluator(s)
        gamma, w13, w14 = _gens(ev, "gamma", "w13", "w14")
        report.add("B_1 - s*gamma*(w13 - s*w14)", ev.B(1) - s * gamma * (w13 - s * w14))
        report.add("D_1 - gamma*(w13 - s*w14)", ev.D(1) - gamma * (w13 - s * w14))
        for k in range(1, k_max):
            report.add(f"B_{k + 1} - (s*gamma*C_{k} - gamma*A_{k})", ev.B(k + 1) - (s * gamma * ev.C(k) - gamma * ev.A(k)))
            report.add(f"D_{k + 1} - (gamma*C_{k} - s*gamma*A_{k})", ev.D(k + 1) - (gamma * ev.C(k) - s * gamma * ev.A(k)))
        for k in range(1, k_max + 1):
            report.add(f"D_{k} - s*B_{k}", ev.D(k) - s * ev.B(k))
    return [report]


# -- E_k^i ----------------------------------------------------------------------------------

def check_eki(k_max: int = DEFAULT_K_MAX, s: int = 1) -> list:
    report = LemmaReport("check-eki", {"k_max": k_max, "s": s})
    with _timed(report):
        ev = form_b_evaluator(s)
        args = (E1, E3, E4)
        for k in range(2, k_max + 1):
            for i in range(3, k + 2):
                for X in args:
                    for Y in args:
                        report.add(f"E_{k}^{i}(e{X + 1},e{Y + 1})", ev.E(k, i, X, Y))
        for k in range(1, k_max + 1):
            for i in range(1, k + 2):
                for X in (E3, E4):
                    for Y in (E3, E4):
                        report.add(f"E_{k}^{i}(S e{X + 1},e{Y + 1})", ev.E(k, i, ev.S_vector(X), Y))
        for i in (1, 2):
            report.add(f"base case E_1^{i}(e3,e4)", ev.E(1, i, E3, E4))
    return [report]


# -- A_k, C_k recursions and closed forms ---------------------------------------------------

def check_akck_and_closed_forms(k_max: int = DEFAULT_K_MAX, s: int = 1) -> list:
    report = LemmaReport("check-akck-and-closed-forms", {"k_max": k_max, "s": s})
    with _timed(report):
        ev = form_b_evaluator(s)
        l1, gamma, w13, w14 = _gens(ev, "l1", "gamma", "w13", "w14")
        report.add("A_1 + l1*w13", ev.A(1) + l1 * w13)
        report.add("C_1 + l1*w14", ev.C(1) + l1 * w14)
        for k in range(1, k_max):
            report.add(f"A_{k + 1} + l1*(C_{k} + D_{k})", ev.A(k + 1) + l1 * (ev.C(k) + ev.D(k)))
            report.add(f"C_{k + 1} + l1*(A_{k} + B_{k})", ev.C(k + 1) + l1 * (ev.A(k) + ev.B(k)))
        if k_max >= 1:
            report.add("l1^2*B_1 - gamma*l1*(C_1 - s*A_1)", l1**2 * ev.B(1) - gamma * l1 * (ev.C(1) - s * ev.A(1)))
        geometric_base = ev.C(1) - s * ev.A(1)
        for k in range(1, k_max + 1):
            report.add(f"C_{k} - s*A_{k} - (s*l1)^{k - 1}*(C_1 - s*A_1)",
                       ev.C(k) - s * ev.A(k) - (s * l1) ** (k - 1) * geometric_base)
        k = 0
        while 2 * k + 1 <= k_max:
            n = 2 * k + 1
            report.add(f"A_{n} + l1^{n}*w13", ev.A(n) + l1**n * w13)
            report.add(f"C_{n} + l1^{n}*w14", ev.C(n) + l1**n * w14)
            if k >= 1:
                report.add(f"A_{n} - l1^2*A_{n - 2}", ev.A(n) - l1**2 * ev.A(n - 2))
                report.add(f"C_{n} - l1^2*C_{n - 2}", ev.C(n) - l1**2 * ev.C(n - 2))
            k += 1
    return [report]


# -- T / U / Uhat family ----------------------------------------------------------------------

def admissible_pqr(k: int):
    for p in range(k):
        for q in range(k - p):
            yield p, q, k - 1 - p - q


def check_t_family(k_max: int = DEFAULT_K_MAX, s: int = 1) -> list:
    report = LemmaReport("check-t-family", {"k_max": k_max, "s": s})
    with _timed(report):
        ev = form_b_evaluator(s)
        l1, gamma, w34 = _gens(ev, "l1", "gamma", "w34")
        pair = (E3, E4)
        report.add("T^1_000(e3,e3) - gamma*w34", ev.T(1, 0, 0, 0, E3, E3) - gamma * w34)
        if k_max >= 2:
            report.add("T^2_001(e3,e3) + s*l1*gamma*w34", ev.T(2, 0, 0, 1, E3, E3) + s * l1 * gamma * w34)
        for k in range(1, k_max + 1):
            for p, q, r in admissible_pqr(k):
                t33 = ev.T(k, p, q, r, E3, E3)
                tag = f"T^{k}_{p}{q}{r}"
                report.add(f"{tag}(e3,e3) - {tag}(e4,e4)", t33 - ev.T(k, p, q, r, E4, E4))
                report.add(f"{tag}(e3,e3) - s*{tag}(e3,e4)", t33 - s * ev.T(k, p, q, r, E3, E4))
                report.add(f"{tag}(e3,e3) - s*{tag}(e4,e3)", t33 - s * ev.T(k, p, q, r, E4, E3))
                if p >= 1 and k >= 2:
                    for X in pair:
                        for Y in pair:
                            report.add(f"{tag}(e{X + 1},e{Y + 1}) vanishes", ev.T(k, p, q, r, X, Y))
        # expansion of T^{k+1}_{0,q,r} through U and Uhat, q + r = k
        for k in range(1, k_max):
            for q in range(k + 1):
                r = k - q
                for X in pair:
                    for Y in pair:
                        rhs = ev.model.zero
                        for i in range(q):
                            rhs = rhs + ev.U(k, i, q - 1 - i, r, X, Y)
                        for i in range(r):
                            rhs = rhs + ev.U(k, q, i, r - 1 - i, X, Y, hat=True)
                        report.add(f"T^{k + 1}_0{q}{r}(e{X + 1},e{Y + 1}) - U/Uhat expansion",
                                   ev.T(k + 1, 0, q, r, X, Y) - rhs)
        for k in range(2, k_max + 1):
            closed = 2 ** (k - 2) * (-s * l1) ** (k - 1) * gamma * w34
            report.add(f"T^{k}_00{k - 1}(e3,e3) - 2^{k - 2}(-s*l1)^{k - 1}*gamma*w34", ev.T(k, 0, 0, k - 1, E3, E3) - closed)
    return [report]


# -- basis change -------------------------------------------------------------------------------

PYTHAGOREAN_POINTS = ((5, 3), (5, 4), (3, 5), (4, 5), (13, 5), (13, 12), (5, 13), (17, 8), (10, 6))
NON_SQUARE_POINTS = ((2, 1), (3, 1), (1, 3), (7, 2))


def _block_targets(l1, l2, alpha, beta, gamma):
    eps = 1 if beta * beta - gamma * gamma > 0 else -1
    target_S = ((l1, 0, 0, 0), (0, l2, 0, 0), (0, 0, alpha + beta, 0), (0, 0, 0, 0))
    target_h = ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, -eps, 0), (0, 0, 0, eps))
    return eps, target_S, target_h


def _compare(report: LemmaReport, new, target_S, target_h, label: str) -> None:
    for i in range(4):
        for j in range(4):
            report.add(f"{label} S'[{i + 1}{j + 1}]", new.S[i][j] - target_S[i][j])
            report.add(f"{label} h'[{i + 1}{j + 1}]", new.h[i][j] - target_h[i][j])


def _exact_point(beta, gamma, omega=None) -> tuple:
    beta, gamma = Fraction(beta), Fraction(gamma)
    alpha = -gamma * gamma / beta
    model = canonical_form_b(s=None, alpha=alpha, beta=beta, gamma=gamma, omega=omega)
    l1 = Polynomial.generator("l1", model.variables)
    l2 = Polynomial.generator("l2", model.variables)
    return model, l1, l2, alpha, beta, gamma


def check_basis_change_lemma(samples: int = 20, seed: int = 0) -> list:
    """Block change of basis on the variety alpha*beta + gamma^2 = 0.

    Points where |beta^2 - gamma^2| is a rational square use the matrix P
    itself; the remaining rational points use P = Q / sqrt(c) with the scale
    applied symbolically, and random real points run in float mode.
    """
    report = LemmaReport("check-basis-change-lemma", {"float_samples": samples, "seed": seed})
    with _timed(report):
        exact_points = []
        for beta, gamma in PYTHAGOREAN_POINTS:
            model, l1, l2, alpha, beta, gamma = _exact_point(beta, gamma)
            eps, tS, th = _block_targets(l1, l2, alpha, beta, gamma)
            new = apply_basis_change(model, block_basis_change(beta, gamma, exact=True))
            _compare(report, new, tS, th, f"beta={beta} gamma={gamma}")
            exact_points.append({"beta": str(beta), "gamma": str(gamma), "alpha": str(alpha), "epsilon": eps, "path": "P"})
        for beta, gamma in NON_SQUARE_POINTS:
            # omega must not couple the blocks, else omega' has entries with sqrt(c)
            model, l1, l2, alpha, beta, gamma = _exact_point(beta, gamma, omega_from_entries({"w12": 1, "w34": 1}))
            eps, tS, th = _block_targets(l1, l2, alpha, beta, gamma)
            Q, c = block_scaling(beta, gamma)
            new = apply_scaled_basis_change(model, Q, c)
            _compare(report, new, tS, th, f"beta={beta} gamma={gamma} (scaled)")
            exact_points.append({"beta": str(beta), "gamma": str(gamma), "alpha": str(alpha), "epsilon": eps,
                                 "path": "Q/sqrt(c)"})
        # before imposing det = 0: S' block = adj(Q) B Q / det(Q), det(Q) = gamma^2 - beta^2
        ev = form_b_evaluator(None)
        alpha, beta, gamma = _gens(ev, "alpha", "beta", "gamma")
        det = alpha * beta + gamma * gamma
        B = ((alpha, gamma), (-gamma, beta))
        Q = ((gamma, beta), (beta, gamma))
        adjQ = ((gamma, -beta), (-beta, gamma))
        M = mat_mul(mat_mul(adjQ, B), Q)
        # numerators over beta^2 - gamma^2, hence the overall sign flip below
        N = ((beta**3 - 2 * beta * gamma**2 - alpha * gamma**2, -det * gamma), (det * gamma, det * beta))
        for i in range(2):
            for j in range(2):
                report.add(f"generic block [{i + 3}{j + 3}]: adj(Q)BQ + numerator", M[i][j] + N[i][j])
        trace = (M[0][0] + M[1][1]) + (alpha + beta) * (beta * beta - gamma * gamma)
        report.add("generic block trace equals alpha + beta", trace)
        report.details["generic_block_numerators"] = [[str(x) for x in row] for row in N]
        QtJQ = mat_mul(mat_mul(Q, ((1, 0), (0, -1))), Q)
        target = ((gamma**2 - beta**2, 0), (0, beta**2 - gamma**2))
        for i in range(2):
            for j in range(2):
                report.add(f"generic h block [{i + 3}{j + 3}]: Q^T J Q", QtJQ[i][j] - target[i][j])
        # float mode
        rng = random.Random(seed)
        float_points = [(1.0, 2.0)]
        while len(float_points) < samples + 1:
            beta, gamma = rng.uniform(-3, 3), rng.uniform(-3, 3)
            if abs(beta) < 0.1 or abs(gamma) < 0.1 or abs(beta * beta - gamma * gamma) < 0.1:
                continue
            float_points.append((beta, gamma))
        for n, (beta, gamma) in enumerate(float_points):
            alpha = -gamma * gamma / beta
            l1, l2 = rng.uniform(-3, 3), rng.uniform(-3, 3)
            omega = omega_from_entries({"w12": 1.0, "w34": 1.0, "w13": rng.uniform(-1, 1)})
            model = canonical_form_b(l1, l2, gamma, s=None, alpha=alpha, beta=beta, omega=omega)
            eps, tS, th = _block_targets(l1, l2, alpha, beta, gamma)
            new = apply_basis_change(model, block_basis_change(beta, gamma, exact=False))
            _compare(report, new, tS, th, f"float#{n} beta={beta:.6g} gamma={gamma:.6g}")
        identity = apply_basis_change(ev.model, as_matrix([[Fraction(int(i == j)) for j in range(4)] for i in range(4)]))
        for name in ("h", "S", "omega"):
            a, b = getattr(identity, name), getattr(ev.model, name)
            report.add(f"identity P leaves {name} unchanged",
                       sum((a[i][j] - b[i][j]) * (a[i][j] - b[i][j]) for i in range(4) for j in range(4)))
        report.details["exact_points"] = exact_points
        report.details["float_points"] = len(float_points)
    return [report]


# -- main theorem: symbolic proof chain ---------------------------------------------------------

def theorem_symbolic(k_max: int = DEFAULT_K_MAX, s: int = 1) -> LemmaReport:
    report = LemmaReport("theorem-search", {"campaign": "symbolic", "k_max": k_max, "s": s})
    with _timed(report):
        ev = form_b_evaluator(s)
        l1, gamma, w12, w13, w14, w34 = _gens(ev, "l1", "gamma", "w12", "w13", "w14", "w34")
        steps = []
        for k in range(0, k_max + 1):
            n = 2 * k + 1
            a, c = ev.A(n), ev.C(n)
            report.add(f"A_{n} = -l1^{n}*w13", a + l1**n * w13)
            report.add(f"C_{n} = -l1^{n}*w14", c + l1**n * w14)
        steps.append("A_{2k+1} = -l1^{2k+1} w13 and C_{2k+1} = -l1^{2k+1} w14: with l1 != 0 both vanish only if w13 = w14 = 0")
        pf = omega_pfaffian(ev.model)
        report.add("pfaffian|w13=w14=0 - w12*w34", pf.subs({"w13": 0, "w14": 0}) - w12 * w34)
        steps.append("pfaffian reduces to w12*w34, so w34 != 0")
        for k in range(2, k_max + 1):
            t = ev.T(k, 0, 0, k - 1, E3, E3)
            coeff = Fraction(2 ** (k - 2) * (-s) ** (k - 1))
            report.add(f"T^{k}_00{k - 1}(e3,e3) - {coeff}*l1^{k - 1}*gamma*w34", t - coeff * l1 ** (k - 1) * gamma * w34)
            report.add(f"T^{k}_00{k - 1}(e3,e3) unchanged by w13=w14=0", t - t.subs({"w13": 0, "w14": 0}))
        steps.append("T^k_{0,0,k-1}(e3,e3) is a nonzero multiple of l1^(k-1)*gamma*w34, forcing l1*gamma*w34 = 0")
        flat_block = ev.model.S
        rank_report = symbolic_rank(tuple(tuple(x.subs({"l1": 0, "l2": 0}) for x in row) for row in flat_block))
        report.add("rank S at l1 = l2 = 0 minus 1", Fraction(rank_report.generic_rank - 1))
        report.details["steps"] = steps
    return report


# -- nabla^k omega = 0 reduction ----------------------------------------------------------------

def check_nabla_corollary(trials: int = 6, seed: int = 0, k: int = 1, dims=(2, 3)) -> list:
    report = LemmaReport("check-nabla-corollary", {"k": k, "trials": trials, "seed": seed, "dims": list(dims)})
    with _timed(report):
        rng = random.Random(seed)
        nontrivial = 0
        for t in range(trials):
            dim = dims[t % len(dims)]
            trial_seed = rng.randrange(2**31)
            jet = random_jet(dim, 2 * k, 2, trial_seed, trace_free=True)
            labels, basis = parallel_field_at_origin(jet, 2 * k)
            coeffs = [Fraction(0)] * len(labels)
            for vec in basis:
                c = rng.randint(-3, 3)
                coeffs = [a + c * b for a, b in zip(coeffs, vec)]
            constrained = field_from_coefficients(jet, labels, coeffs, 2 * k)
            nab = covariant_derivative(constrained, 2 * k).field_at_origin()
            report.add(f"trial {t} (dim {dim}, seed {trial_seed}): sum |nabla^{2 * k} T(0)| components",
                       sum((abs(x) for x in nab.flat), Fraction(0)))
            R0 = curvature_at_origin(constrained)
            T0 = constrained.field_at_origin()
            rkt = T0
            for _ in range(k):
                rkt = curvature_action(R0, rkt)
            report.add(f"trial {t}: sum |R^{k} T(0)| components", sum((abs(x) for x in rkt.flat), Fraction(0)))
            if any(x != 0 for x in T0.flat):
                nontrivial += 1
        # flat connection and constant field
        flat = random_jet(2, 2, 2, seed, flat=True)
        const = flat.with_field(np.vectorize(lambda p: p.truncate(0), otypes=[object])(flat.field), 2)
        report.add("flat, constant T: |nabla^2 T(0)|", sum((abs(x) for x in covariant_derivative(const, 2).field_at_origin().flat), Fraction(0)))
        report.add("flat, constant T: |R.T(0)|", sum((abs(x) for x in curvature_action(curvature_at_origin(const), const.field_at_origin()).flat), Fraction(0)))
        # informational: nabla^2 T != 0 does not force R.T != 0
        x1 = Polynomial.generator("x1", ("x1", "x2"))
        nonpar = make_jet(2, 2, {}, {(0, 1): x1 * x1})
        n2 = covariant_derivative(nonpar, 2).field_at_origin()
        rt = curvature_action(curvature_at_origin(nonpar), nonpar.field_at_origin())
        report.details["informational"] = {
            "flat connection, T = x1^2 dx1 (x) dx2": {
                "nabla2_nonzero": any(x != 0 for x in n2.flat),
                "RT_nonzero": any(x != 0 for x in rt.flat),
            }
        }
        report.details["trials_with_nonzero_T0"] = nontrivial
    return [report]


# -- registry -----------------------------------------------------------------------------------

@dataclass
class SuiteConfig:
    k_max: int = DEFAULT_K_MAX
    signs: tuple = SIGNS
    seed: int = 0
    tolerance: float = DEFAULT_TOLERANCE
    float_samples: int = 20
    sweep: object = None


def _per_sign(fn: Callable) -> Callable:
    def run(cfg: SuiteConfig) -> list:
        return [r for s in cfg.signs for r in fn(cfg.k_max, s)]
    return run


def _theorem(cfg: SuiteConfig) -> list:
    from .search import SweepSpec, theorem_search
    spec = cfg.sweep or SweepSpec.default(k_max=min(cfg.k_max, 3), tolerance=cfg.tolerance)
    return theorem_search(spec, symbolic_k_max=cfg.k_max, signs=cfg.signs)


CHECKS: dict = {
    "check-det-formulas": lambda cfg: check_det_formulas(cfg.k_max),
    "check-corollary-detzero": lambda cfg: check_corollary_detzero(cfg.k_max),
    "check-abcd": _per_sign(check_abcd),
    "check-eki": _per_sign(check_eki),
    "check-akck-and-closed-forms": _per_sign(check_akck_and_closed_forms),
    "check-t-family": _per_sign(check_t_family),
    "check-basis-change-lemma": lambda cfg: check_basis_change_lemma(cfg.float_samples, cfg.seed),
    "theorem-search": _theorem,
    "check-nabla-corollary": lambda cfg: check_nabla_corollary(seed=cfg.seed),
}


def run_check(lemma_id: str, cfg: SuiteConfig | None = None) -> list:
    cfg = cfg or SuiteConfig()
    try:
        fn = CHECKS[lemma_id]
    except KeyError:
        raise KeyError(lemma_id) from None
    reports = fn(cfg)
    for r in reports:
        r.tolerance = cfg.tolerance
    return reports


def sort_reports(reports: list) -> list:
    """Deterministic merge order: lemma id, then parameters."""
    import json
    return sorted(reports, key=lambda r: (r["lemma"], json.dumps(r["params"], sort_keys=True)))
