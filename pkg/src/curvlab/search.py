"""Numeric sweep for the rank statement: R^k . omega = 0 with omega non-degenerate
should force rank S <= 1.

R^k . omega is linear in omega, so for each shape operator we compute the images
M_k of the six basis 2-forms once (dense float tensors, k <= 3 keeps them at
4**8 entries) and test every omega on the grid against them. A Gram-matrix
screen discards points far from the locus; candidates are then confirmed by
evaluating max |M_k w| directly.
"""

from __future__ import annotations

import itertools
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .curvature import curvature_action
from .errors import SweepConfigError
from .scalars import DEFAULT_TOLERANCE
from .tensors import LORENTZ_H, OMEGA_NAMES, rank

MAX_SWEEP_K = 3
_BASIS_PAIRS = [(int(n[1]) - 1, int(n[2]) - 1) for n in OMEGA_NAMES]


def _values(spec, name: str) -> tuple:
    """A parameter range: a list of numbers or {"min", "max", "step"}."""
    if isinstance(spec, Mapping):
        try:
            lo, hi, step = float(spec["min"]), float(spec["max"]), float(spec.get("step", 1))
        except KeyError as exc:
            raise SweepConfigError(f"{name}: range needs min and max (missing {exc.args[0]})") from None
        if step <= 0:
            raise SweepConfigError(f"{name}: step must be positive")
        n = int(np.floor((hi - lo) / step + 1e-9)) + 1
        return tuple(round(lo + i * step, 12) for i in range(max(n, 0))), step
    if isinstance(spec, (int, float)):
        return (float(spec),), None
    try:
        return tuple(float(x) for x in spec), None
    except TypeError:
        raise SweepConfigError(f"{name}: expected a list of numbers or a range object") from None


@dataclass(frozen=True)
class SweepSpec:
    lambda1: tuple = (-2.0, -1.0, 0.0, 1.0, 2.0)
    lambda2: tuple = (-2.0, -1.0, 0.0, 1.0, 2.0)
    gamma: tuple = (-2.0, -1.0, 1.0, 2.0)
    signs: tuple = (1, -1)
    omega_values: tuple = (-1.0, 0.0, 1.0)
    omega_points: tuple = ()
    diagonal_lambda: tuple = (-1.0, 0.0, 1.0)
    k_max: int = 3
    tolerance: float = DEFAULT_TOLERANCE
    clamped_gamma: tuple = ()

    def __post_init__(self):
        if self.k_max < 1:
            raise SweepConfigError("k-max must be >= 1")
        if self.k_max > MAX_SWEEP_K:
            raise SweepConfigError(f"numeric sweeps support k-max <= {MAX_SWEEP_K}")
        if self.tolerance <= 0:
            raise SweepConfigError("tolerance must be positive")
        if any(g == 0 for g in self.gamma):
            raise SweepConfigError("gamma range must exclude 0")
        if any(s not in (1, -1) for s in self.signs):
            raise SweepConfigError("signs must be +1 or -1")
        if self.n_configs == 0 or not self.omegas():
            raise SweepConfigError("sweep configuration selects no points")
        signal = [abs(g) for g in self.gamma] + [abs(x) for w in self.omegas() for x in w if x != 0]
        if signal and self.tolerance >= min(signal):
            raise SweepConfigError("tolerance exceeds signal")
        if any(abs(g) <= self.tolerance for g in self.gamma):
            raise SweepConfigError("gamma range must stay above the tolerance")

    @classmethod
    def default(cls, k_max: int = 3, tolerance: float = DEFAULT_TOLERANCE) -> "SweepSpec":
        return cls(k_max=k_max, tolerance=tolerance)

    @classmethod
    def from_json(cls, doc: Mapping) -> "SweepSpec":
        if not isinstance(doc, Mapping):
            raise SweepConfigError("$: sweep must be a JSON object")
        known = {"lambda1", "lambda2", "gamma", "signs", "omega", "diagonal", "k_max", "tolerance"}
        unknown = sorted(set(doc) - known)
        if unknown:
            raise SweepConfigError(f"$: unknown keys {unknown}")
        kwargs: dict = {}
        for key in ("lambda1", "lambda2"):
            if key in doc:
                kwargs[key] = _values(doc[key], key)[0]
        clamped = ()
        if "gamma" in doc:
            gammas, step = _values(doc["gamma"], "gamma")
            if step is not None:
                # ranges are clamped to |gamma| >= step; explicit lists are taken literally
                kept = tuple(g for g in gammas if abs(g) >= step)
                clamped = tuple(g for g in gammas if g not in kept)
                gammas = kept
            kwargs["gamma"] = gammas
        if "signs" in doc:
            kwargs["signs"] = tuple(int(s) for s in doc["signs"])
        if "omega" in doc:
            om = doc["omega"]
            if isinstance(om, Mapping) and "points" in om:
                pts = om["points"]
                if not all(isinstance(p, (list, tuple)) and len(p) == 6 for p in pts):
                    raise SweepConfigError("$.omega.points: each point lists w12, w13, w14, w23, w24, w34")
                kwargs["omega_points"] = tuple(tuple(float(x) for x in p) for p in pts)
                kwargs["omega_values"] = ()
            else:
                vals = om.get("values") if isinstance(om, Mapping) else om
                kwargs["omega_values"] = _values(vals, "omega")[0]
        if "diagonal" in doc:
            d = doc["diagonal"]
            kwargs["diagonal_lambda"] = () if d in (False, None) else _values(d, "diagonal")[0]
        if "k_max" in doc:
            kwargs["k_max"] = int(doc["k_max"])
        if "tolerance" in doc:
            kwargs["tolerance"] = float(doc["tolerance"])
        kwargs["clamped_gamma"] = clamped
        return cls(**kwargs)

    def to_json(self) -> dict:
        doc = {
            "lambda1": list(self.lambda1),
            "lambda2": list(self.lambda2),
            "gamma": list(self.gamma),
            "signs": list(self.signs),
            "diagonal": list(self.diagonal_lambda),
            "k_max": self.k_max,
            "tolerance": self.tolerance,
        }
        doc["omega"] = {"points": [list(p) for p in self.omega_points]} if self.omega_points else list(self.omega_values)
        return doc

    def omegas(self) -> list:
        if self.omega_points:
            return [tuple(p) for p in self.omega_points]
        return list(itertools.product(self.omega_values, repeat=6))

    def configs(self) -> list:
        """Shape-operator configurations as (family, parameter dict)."""
        out = []
        for l1, l2, g, s in itertools.product(self.lambda1, self.lambda2, self.gamma, self.signs):
            out.append(("block", {"l1": l1, "l2": l2, "gamma": g, "s": s}))
        for lam in itertools.product(self.diagonal_lambda, repeat=4):
            out.append(("diagonal", {"l1": lam[0], "l2": lam[1], "l3": lam[2], "l4": lam[3]}))
        return out

    @property
    def n_configs(self) -> int:
        return (len(self.lambda1) * len(self.lambda2) * len(self.gamma) * len(self.signs)
                + len(self.diagonal_lambda) ** 4)


def shape_operator(family: str, params: Mapping) -> np.ndarray:
    S = np.zeros((4, 4))
    if family == "block":
        g, s = params["gamma"], params["s"]
        S[0, 0], S[1, 1] = params["l1"], params["l2"]
        S[2:, 2:] = [[s * g, g], [-g, -s * g]]
    elif family == "diagonal":
        S[np.diag_indices(4)] = [params[f"l{i}"] for i in range(1, 5)]
    else:
        raise SweepConfigError(f"unknown family {family!r}")
    return S


def float_curvature(S: np.ndarray, h: np.ndarray | None = None) -> np.ndarray:
    """R[i, j, k, l] = h_jk S^l_i - h_ik S^l_j."""
    h = np.asarray(LORENTZ_H, dtype=float) if h is None else h
    return np.einsum("jk,li->ijkl", h, S) - np.einsum("ik,lj->ijkl", h, S)


def basis_images(R: np.ndarray, k_max: int) -> list:
    """[M_1, ..., M_kmax], M_k[:, b] = flattened R^k . (basis 2-form b)."""
    out = [[] for _ in range(k_max)]
    for a, b in _BASIS_PAIRS:
        w = np.zeros((4, 4))
        w[a, b], w[b, a] = 1.0, -1.0
        for k in range(k_max):
            w = curvature_action(R, w)
            out[k].append(w.ravel())
    return [np.stack(cols, axis=1) for cols in out]


def pfaffians(W: np.ndarray) -> np.ndarray:
    w12, w13, w14, w23, w24, w34 = W.T
    return w12 * w34 - w13 * w24 + w14 * w23


@dataclass
class ConfigResult:
    family: str
    params: dict
    rank: int
    points: int = 0
    degenerate: int = 0
    locus: list = field(default_factory=list)  # per k: count of non-degenerate points with R^k w = 0
    violators: list = field(default_factory=list)
    table: list = field(default_factory=list)


def sweep_config(family: str, params: dict, W: np.ndarray, k_max: int, tol: float,
                 keep_table: bool = False) -> ConfigResult:
    S = shape_operator(family, params)
    rk = rank(tuple(tuple(float(x) for x in row) for row in S), tol)
    res = ConfigResult(family, dict(params), rk, points=len(W))
    pf = pfaffians(W)
    ok = np.abs(pf) > tol
    res.degenerate = int((~ok).sum())
    Ms = basis_images(float_curvature(S), k_max)
    in_locus_any = np.zeros(len(W), dtype=bool)
    per_k = []
    for k, M in enumerate(Ms, start=1):
        G = M.T @ M
        q = np.einsum("pi,ij,pj->p", W, G, W)
        slack = 1e-9 * np.trace(G) * np.einsum("pi,pi->p", W, W)
        candidates = np.nonzero(ok & (q <= M.shape[0] * tol * tol + slack))[0]
        hit = np.zeros(len(W), dtype=bool)
        if len(candidates):
            vals = np.abs(M @ W[candidates].T).max(axis=0)
            hit[candidates[vals <= tol]] = True
        per_k.append(hit)
        res.locus.append(int(hit.sum()))
        in_locus_any |= hit
    if rk > 1:
        for p in np.nonzero(in_locus_any)[0]:
            ks = [k + 1 for k, hit in enumerate(per_k) if hit[p]]
            res.violators.append({"family": family, "params": dict(params),
                                  "omega": dict(zip(OMEGA_NAMES, W[p].tolist())),
                                  "k": ks, "rank": rk})
    if keep_table:
        for p in range(len(W)):
            res.table.append({"family": family, "params": dict(params),
                              "omega": dict(zip(OMEGA_NAMES, W[p].tolist())),
                              "pfaffian": float(pf[p]), "degenerate": bool(not ok[p]),
                              "in_locus": [k + 1 for k, hit in enumerate(per_k) if hit[p]],
                              "rank": rk})
    return res


def _run_chunk(args) -> list:
    configs, W, k_max, tol, keep = args
    return [sweep_config(f, p, W, k_max, tol, keep) for f, p in configs]


TABLE_LIMIT = 64


def run_sweep(spec: SweepSpec, parallelism: int = 1) -> dict:
    """Evaluate every (configuration, omega) point; returns the summary dict."""
    W = np.array(spec.omegas(), dtype=float)
    configs = spec.configs()
    total = len(configs) * len(W)
    keep = total <= TABLE_LIMIT
    if parallelism > 1 and len(configs) > 1:
        n = min(parallelism, len(configs))
        chunks = [(configs[i::n], W, spec.k_max, spec.tolerance, keep) for i in range(n)]
        with ProcessPoolExecutor(max_workers=n) as pool:
            parts = list(pool.map(_run_chunk, chunks))
        # undo the striding so results follow configuration order
        results = [None] * len(configs)
        for i, part in enumerate(parts):
            for j, r in enumerate(part):
                results[i + j * n] = r
    else:
        results = _run_chunk((configs, W, spec.k_max, spec.tolerance, keep))
    summary = {
        "points": total,
        "configurations": len(configs),
        "degenerate_omega": sum(r.degenerate for r in results),
        "locus_points_by_k": [sum(r.locus[k] for r in results) for k in range(spec.k_max)],
        "violators": [v for r in results for v in r.violators],
        "clamped_gamma": list(spec.clamped_gamma),
    }
    by_family: dict = {}
    histogram: dict = {}
    for r in results:
        fam = by_family.setdefault(r.family, {"configurations": 0, "locus_points": 0})
        fam["configurations"] += 1
        fam["locus_points"] += max(r.locus) if r.locus else 0
        if r.locus and max(r.locus):
            histogram[str(r.rank)] = histogram.get(str(r.rank), 0) + max(r.locus)
    summary["families"] = by_family
    summary["locus_rank_histogram"] = dict(sorted(histogram.items()))
    if keep:
        summary["table"] = [row for r in results for row in r.table]
    return summary


def numeric_report(spec: SweepSpec, parallelism: int = 1):
    from .lemmas import LemmaReport
    report = LemmaReport("theorem-search", {"campaign": "numeric", "k_max": spec.k_max,
                                            "tolerance": spec.tolerance}, tolerance=spec.tolerance)
    start = time.perf_counter()
    summary = run_sweep(spec, parallelism)
    report.add("rank violators on the R^k w = 0 locus", Fraction(len(summary["violators"])))
    report.details = {"sweep": spec.to_json(), **summary}
    report.elapsed_ms = (time.perf_counter() - start) * 1000.0
    return report


def theorem_search(spec: SweepSpec, *, symbolic_k_max: int | None = None, signs: Sequence[int] | None = None,
                   parallelism: int = 1) -> list:
    """Symbolic proof chain per sign, then the numeric sweep."""
    from .lemmas import DEFAULT_K_MAX, theorem_symbolic
    k = DEFAULT_K_MAX if symbolic_k_max is None else symbolic_k_max
    out = [theorem_symbolic(k, s) for s in (signs or spec.signs)]
    out.append(numeric_report(spec, parallelism))
    return out


def load_sweep(path) -> SweepSpec:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SweepConfigError(f"$: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    return SweepSpec.from_json(doc)
