"""Polynomial jets of a torsion-free connection and a tensor field.

A :class:`JetModel` carries Christoffel symbols and a (0, p)-tensor field as
polynomials in the coordinates x1..xn, truncated at a total degree ``order``.
Each covariant derivative consumes one degree of Taylor accuracy, so
``covariant_derivative(jet, m)`` returns a jet of order ``order - m`` whose
value at the origin is exact.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .curvature import CurvatureOperator, dense_power
from .errors import JetOrderError, ModelInvariantError
from .scalars import Polynomial, from_json, to_json
from .tensors import nullspace


def coordinates(dim: int) -> tuple:
    return tuple(f"x{i + 1}" for i in range(dim))


@dataclass(frozen=True)
class JetModel:
    """``gamma[l, i, j]`` is Gamma^l_{ij}; ``field`` has shape (dim,)*p."""

    dim: int
    order: int
    gamma: np.ndarray
    field: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        n = self.dim
        if self.gamma.shape != (n, n, n):
            raise ModelInvariantError("shape mismatch", f"gamma must be {n}x{n}x{n}")
        if any(s != n for s in self.field.shape):
            raise ModelInvariantError("shape mismatch", f"field axes must all have length {n}")
        for l, i, j in itertools.product(range(n), repeat=3):
            if i < j and not (self.gamma[l, i, j] - self.gamma[l, j, i]).is_zero():
                raise ModelInvariantError("connection has torsion", f"Gamma^{l + 1}_{{{i + 1}{j + 1}}} != Gamma^{l + 1}_{{{j + 1}{i + 1}}}")
        for p in itertools.chain(self.gamma.flat, self.field.flat):
            if p.total_degree() > self.order:
                raise ModelInvariantError("jet exceeds its order", f"degree {p.total_degree()} > {self.order}")

    @property
    def rank(self) -> int:
        return self.field.ndim

    def with_field(self, field: np.ndarray, order: int | None = None) -> "JetModel":
        order = self.order if order is None else order
        gamma = _truncate(self.gamma, order)
        return JetModel(self.dim, order, gamma, _truncate(field, order), self.seed)

    def field_at_origin(self) -> np.ndarray:
        return _at_origin(self.field)


def _truncate(arr: np.ndarray, degree: int) -> np.ndarray:
    out = np.empty(arr.shape, dtype=object)
    for idx in np.ndindex(arr.shape):
        out[idx] = arr[idx].truncate(degree)
    return out


def _at_origin(arr: np.ndarray) -> np.ndarray:
    out = np.empty(arr.shape, dtype=object)
    for idx in np.ndindex(arr.shape):
        out[idx] = arr[idx].constant_term()
    return out


def make_jet(dim: int, order: int, gamma: Mapping | np.ndarray, field: Mapping | np.ndarray, rank: int | None = None,
             seed: int | None = None) -> JetModel:
    """Build a jet from arrays or sparse {(l, i, j): poly} / {(c1..cp): poly} maps."""
    xs = coordinates(dim)
    zero = Polynomial.zero(xs)
    if not isinstance(gamma, np.ndarray):
        g = np.full((dim,) * 3, zero, dtype=object)
        for key, val in gamma.items():
            g[tuple(key)] = val if isinstance(val, Polynomial) else Polynomial.constant(val, xs)
        gamma = g
    if not isinstance(field, np.ndarray):
        if rank is None:
            rank = len(next(iter(field))) if field else 2
        f = np.full((dim,) * rank, zero, dtype=object)
        for key, val in field.items():
            f[tuple(key)] = val if isinstance(val, Polynomial) else Polynomial.constant(val, xs)
        field = f
    gamma = _with_vars(gamma, xs)
    field = _with_vars(field, xs)
    return JetModel(dim, order, gamma, field, seed)


def _with_vars(arr: np.ndarray, xs: tuple) -> np.ndarray:
    out = np.empty(arr.shape, dtype=object)
    for idx in np.ndindex(arr.shape):
        v = arr[idx]
        out[idx] = v.with_variables(xs) if isinstance(v, Polynomial) else Polynomial.constant(v, xs)
    return out


def nabla(jet: JetModel) -> JetModel:
    """One covariant derivative: (nabla T)_{i c1..cp} = d_i T_c - sum_j Gamma^l_{i c_j} T_{c1..l..cp}."""
    if jet.order < 1:
        raise JetOrderError("jet order too low for requested derivative count")
    n, d = jet.dim, jet.order - 1
    xs = coordinates(n)
    T = jet.field
    deriv = np.empty((n,) + T.shape, dtype=object)
    for i in range(n):
        for idx in np.ndindex(T.shape):
            deriv[(i,) + idx] = T[idx].diff(xs[i]).truncate(d)
    # G[i, c, l] = Gamma^l_{ic}
    G = np.transpose(jet.gamma, (1, 2, 0))
    out = deriv
    for slot in range(T.ndim):
        term = np.tensordot(G, T, axes=([2], [slot]))  # axes (i, c, remaining T axes)
        term = np.moveaxis(term, 1, 1 + slot)
        out = out - term
    return jet.with_field(_truncate(out, d), d)


def covariant_derivative(jet: JetModel, m: int) -> JetModel:
    if m < 0:
        raise ValueError("derivative count must be non-negative")
    if jet.order < m:
        raise JetOrderError("jet order too low for requested derivative count")
    for _ in range(m):
        jet = nabla(jet)
    return jet


def connection_curvature(jet: JetModel) -> np.ndarray:
    """R^l_{ijk} = d_i G^l_{jk} - d_j G^l_{ik} + G^l_{im} G^m_{jk} - G^l_{jm} G^m_{ik}.

    Returned as ``R[i, j, k, l]`` (the curvature-engine layout), truncated at
    degree ``order - 1``.
    """
    if jet.order < 1:
        raise JetOrderError("jet order too low for requested derivative count")
    n, d = jet.dim, jet.order - 1
    xs = coordinates(n)
    G = jet.gamma
    R = np.empty((n,) * 4, dtype=object)
    for i, j, k, l in itertools.product(range(n), repeat=4):
        val = G[l, j, k].diff(xs[i]) - G[l, i, k].diff(xs[j])
        for m in range(n):
            val = val + G[l, i, m] * G[m, j, k] - G[l, j, m] * G[m, i, k]
        R[i, j, k, l] = val.truncate(d)
    return R


def curvature_at_origin(jet: JetModel) -> CurvatureOperator:
    return CurvatureOperator(_at_origin(connection_curvature(jet)))


def sign_maps(k: int) -> list:
    """All maps a: {1..k} -> {-1, +1} as tuples, with sgn a = a(1)...a(k)."""
    return [(a, int(np.prod(a)) if a else 1) for a in itertools.product((1, -1), repeat=k)]


def signed_sum(nabla2k: np.ndarray, k: int) -> np.ndarray:
    """sum_a sgn(a) (nabla^{2k} T)(X^1_{a(1)}, X^1_{-a(1)}, ..., Y) as a full tensor."""
    total = None
    for a, sgn in sign_maps(k):
        perm = list(range(nabla2k.ndim))
        for j, aj in enumerate(a):
            if aj == -1:
                perm[2 * j], perm[2 * j + 1] = perm[2 * j + 1], perm[2 * j]
        term = np.transpose(nabla2k, perm)
        term = term if sgn > 0 else -term
        total = term if total is None else total + term
    return total


@dataclass
class SignedSumResult:
    k: int
    dim: int
    order: int
    seed: int | None
    lhs: np.ndarray
    rhs: np.ndarray
    residual: np.ndarray
    components: list = field(default_factory=list)
    elapsed_ms: float = 0.0

    @property
    def nonzero(self) -> list:
        return [(idx, self.residual[idx]) for idx in np.ndindex(self.residual.shape) if self.residual[idx] != 0]

    @property
    def passed(self) -> bool:
        return not self.nonzero


def verify_signed_sum(jet: JetModel, k: int, X: Sequence[tuple] | None = None,
                      Y: Sequence[int] | None = None) -> SignedSumResult:
    """Compare (R^k.T)(origin) with the 2^k-term signed sum of nabla^{2k}T(origin).

    With ``X`` (k pairs of 0-based coordinate indices) and ``Y`` given, the
    listed component is singled out in ``components``; the residual always
    covers the full tensor.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if jet.order < 2 * k:
        raise JetOrderError("jet order too low for requested derivative count")
    start = time.perf_counter()
    R0 = curvature_at_origin(jet)
    lhs = dense_power(R0, jet.field_at_origin(), k)
    rhs = signed_sum(covariant_derivative(jet, 2 * k).field_at_origin(), k)
    residual = lhs - rhs
    comps = []
    if X is not None:
        idx = tuple(x for pair in X for x in pair) + tuple(Y or ())
        comps.append((idx, lhs[idx], rhs[idx]))
    return SignedSumResult(k, jet.dim, jet.order, jet.seed, lhs, rhs, residual, comps,
                           (time.perf_counter() - start) * 1000.0)


# -- random jets -----------------------------------------------------------------

def monomials(dim: int, degree: int) -> list:
    return [e for e in itertools.product(range(degree + 1), repeat=dim) if sum(e) <= degree]


def random_polynomial(rng: random.Random, dim: int, degree: int, lo: int = -3, hi: int = 3) -> Polynomial:
    xs = coordinates(dim)
    return Polynomial(xs, {e: rng.randint(lo, hi) for e in monomials(dim, degree)})


def random_jet(dim: int, degree: int, rank: int = 2, seed: int = 0, *, trace_free: bool = False,
               flat: bool = False) -> JetModel:
    """Seeded random torsion-free jet with integer coefficients in [-3, 3].

    ``trace_free`` forces sum_m Gamma^m_{im} = 0, which makes every R(X, Y)
    trace-free.
    """
    rng = random.Random(seed)
    xs = coordinates(dim)
    zero = Polynomial.zero(xs)
    gamma = np.full((dim,) * 3, zero, dtype=object)
    if not flat:
        for l in range(dim):
            for i in range(dim):
                for j in range(i, dim):
                    p = random_polynomial(rng, dim, degree)
                    gamma[l, i, j] = gamma[l, j, i] = p
        if trace_free:
            for i in range(dim):
                trace = sum((gamma[m, i, m] for m in range(dim)), zero)
                gamma[i, i, i] = gamma[i, i, i] - trace
    field = np.empty((dim,) * rank, dtype=object)
    for idx in np.ndindex(field.shape):
        field[idx] = random_polynomial(rng, dim, degree)
    return JetModel(dim, degree, gamma, field, seed)


def parallel_field_at_origin(jet: JetModel, m: int) -> tuple:
    """Linear constraints making nabla^m T vanish at the origin.

    Unknowns are the Taylor coefficients of T up to degree ``m``; returns
    (unknown labels, null-space basis).
    """
    n, p = jet.dim, jet.rank
    xs = coordinates(n)
    labels = [(idx, e) for idx in itertools.product(range(n), repeat=p) for e in monomials(n, m)]
    zero = Polynomial.zero(xs)
    columns = []
    base = JetModel(n, m, _truncate(jet.gamma, m), np.full((n,) * p, zero, dtype=object), jet.seed)
    for idx, e in labels:
        f = np.full((n,) * p, zero, dtype=object)
        f[idx] = Polynomial(xs, {e: 1})
        val = covariant_derivative(base.with_field(f), m).field_at_origin()
        columns.append([val[j] for j in np.ndindex(val.shape)])
    matrix = tuple(zip(*columns))
    return labels, nullspace(matrix)


def field_from_coefficients(jet: JetModel, labels: Sequence, coeffs: Sequence, order: int) -> JetModel:
    n, p = jet.dim, jet.rank
    xs = coordinates(n)
    f = np.full((n,) * p, Polynomial.zero(xs), dtype=object)
    for (idx, e), c in zip(labels, coeffs):
        if c:
            f[idx] = f[idx] + Polynomial(xs, {e: c})
    return JetModel(n, order, _truncate(jet.gamma, order), f, jet.seed)


# -- JSON --------------------------------------------------------------------------

def jet_from_json(doc: Mapping) -> JetModel:
    """{"dim": n, "order": d, "gamma": {"k,i,j": poly}, "field": {"c1,..,cp": poly}, "seed": s}.

    Indices in keys are 1-based; Gamma^k_{ij} is keyed "k,i,j".
    """
    for key in ("dim", "order", "gamma", "field"):
        if key not in doc:
            raise ValueError(f"$.{key}: missing")
    dim, order = doc["dim"], doc["order"]
    xs = coordinates(dim)
    gamma = {}
    for key, val in doc["gamma"].items():
        l, i, j = (int(t) - 1 for t in key.split(","))
        gamma[l, i, j] = from_json(val, xs, "poly")
    field = {}
    for key, val in doc["field"].items():
        field[tuple(int(t) - 1 for t in key.split(","))] = from_json(val, xs, "poly")
    rank = doc.get("rank")
    return make_jet(dim, order, gamma, field, rank=rank, seed=doc.get("seed"))


def jet_to_json(jet: JetModel) -> dict:
    gamma = {",".join(str(t + 1) for t in idx): to_json(jet.gamma[idx])
             for idx in np.ndindex(jet.gamma.shape) if not jet.gamma[idx].is_zero()}
    field = {",".join(str(t + 1) for t in idx): to_json(jet.field[idx])
             for idx in np.ndindex(jet.field.shape) if not jet.field[idx].is_zero()}
    return {"dim": jet.dim, "order": jet.order, "rank": jet.rank, "gamma": gamma, "field": field, "seed": jet.seed}


def iter_trials(dims: Iterable[int], trials: int, seed: int):
    """Deterministic (dim, trial seed) pairs cycling over ``dims``."""
    dims = list(dims)
    rng = random.Random(seed)
    for t in range(trials):
        yield dims[t % len(dims)], rng.randrange(2**31)


def fraction_array(arr: np.ndarray) -> np.ndarray:
    out = np.empty(arr.shape, dtype=object)
    for idx in np.ndindex(arr.shape):
        out[idx] = Fraction(arr[idx])
    return out
