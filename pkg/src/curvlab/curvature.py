"""Gauss-equation curvature and the iterated action R^k . omega.

A dense (0, 2k+2)-tensor in dimension 4 has 4**(2k+2) entries, so the lemma
checks never materialize R^k . omega beyond k = 2. :class:`LazyTensor` instead
evaluates single components by peeling the leading curvature pair off and
recursing one level down, memoizing every intermediate component.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import IndexArityError, InvalidQuantity
from .scalars import is_zero, scalar_kind, zero_like
from .tensors import PointModel

DEFAULT_CACHE_LIMIT = 1 << 22

E1, E2, E3, E4 = 0, 1, 2, 3


class CurvatureOperator:
    """Components R^l_{ijk} with R(e_i, e_j) e_k = sum_l R^l_{ijk} e_l.

    ``array[i, j, k, l]`` holds R^l_{ijk}; ``action[i][j][k]`` lists the
    nonzero ``(l, coefficient)`` pairs and is what the lazy evaluator walks.
    """

    def __init__(self, array: np.ndarray, model: PointModel | None = None):
        self.model = model
        self.array = array
        self.dim = array.shape[0]
        n = self.dim
        self.action = [
            [[tuple((l, array[i, j, k, l]) for l in range(n) if not is_zero(array[i, j, k, l], 0.0))
              for k in range(n)] for j in range(n)]
            for i in range(n)
        ]

    def component(self, l: int, i: int, j: int, k: int):
        return self.array[i, j, k, l]

    def apply(self, i: int, j: int, vector: Sequence) -> list:
        """Coefficients of R(e_i, e_j) v for a coefficient vector v."""
        n = self.dim
        out = [zero_like(vector[0]) for _ in range(n)]
        for k, vk in enumerate(vector):
            if is_zero(vk, 0.0):
                continue
            for l, c in self.action[i][j][k]:
                out[l] = out[l] + c * vk
        return out


def gauss_curvature(model: PointModel) -> CurvatureOperator:
    """R(X, Y)Z = h(Y, Z) SX - h(X, Z) SY, componentwise."""
    n = model.dim
    h, S = model.h, model.S
    arr = np.empty((n, n, n, n), dtype=object if model.kind != "float" else float)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    arr[i, j, k, l] = h[j][k] * S[l][i] - h[i][k] * S[l][j]
    return CurvatureOperator(arr, model)


def curvature_action(R: CurvatureOperator | np.ndarray, T: np.ndarray) -> np.ndarray:
    """Dense R.T: (R.T)(a, b, c1..cp) = -sum_i T(c1, .., R(a, b) c_i, .., cp)."""
    arr = R.array if isinstance(R, CurvatureOperator) else R
    T = np.asarray(T)
    p = T.ndim
    if p < 1:
        raise ValueError("curvature action needs a tensor of rank >= 1")
    out = None
    for slot in range(p):
        # contract R's output index l with T's slot -> axes (a, b, c, remaining T axes)
        term = np.tensordot(arr, T, axes=([3], [slot]))
        term = np.moveaxis(term, 2, 2 + slot)
        out = term if out is None else out + term
    return -out


def dense_power(R: CurvatureOperator | np.ndarray, T: np.ndarray, k: int) -> np.ndarray:
    for _ in range(k):
        T = curvature_action(R, T)
    return T


def omega_array(model: PointModel) -> np.ndarray:
    dtype = float if model.kind == "float" else object
    return np.array([list(row) for row in model.omega], dtype=dtype)


def _cache_limit_default() -> int:
    env = os.environ.get("CURVLAB_CACHE_LIMIT")
    return int(env) if env else DEFAULT_CACHE_LIMIT


class LazyTensor:
    """Component-wise R^depth . omega with memoization.

    Every curvature pair and the trailing omega pair are antisymmetric, so
    components are canonicalized pair by pair before the memo lookup. The memo
    is cleared wholesale when it exceeds ``cache_limit``; values never depend
    on memo state.
    """

    def __init__(self, curvature: CurvatureOperator, omega, depth: int, *, cache_limit: int | None = None,
                 use_pair_symmetry: bool = True):
        if depth < 0:
            raise ValueError("depth must be non-negative")
        self.curvature = curvature
        self.omega = omega
        self.depth = depth
        self.cache_limit = cache_limit if cache_limit is not None else _cache_limit_default()
        self.use_pair_symmetry = use_pair_symmetry
        self._zero = zero_like(omega[0][0])
        self._memo: dict = {}
        self._lock = threading.Lock()
        self.clears = 0

    def __len__(self) -> int:
        return len(self._memo)

    def clear(self) -> None:
        with self._lock:
            self._memo.clear()

    def component(self, idx: Sequence[int]):
        idx = tuple(idx)
        if len(idx) != 2 * self.depth + 2:
            raise IndexArityError(f"index arity mismatch: got {len(idx)}, expected {2 * self.depth + 2}")
        n = self.curvature.dim
        if any(not 0 <= i < n for i in idx):
            raise IndexArityError(f"basis index out of range 0..{n - 1} in {idx}")
        return self._value(self.depth, idx)

    __getitem__ = component

    def with_depth(self, depth: int) -> "LazyTensor":
        """A view at another depth sharing this tensor's memo."""
        other = LazyTensor.__new__(LazyTensor)
        other.__dict__.update(self.__dict__)
        other.depth = depth
        return other

    def _value(self, depth: int, idx: tuple):
        sign = 1
        if self.use_pair_symmetry:
            canon = list(idx)
            for j in range(0, len(canon), 2):
                a, b = canon[j], canon[j + 1]
                if a == b:
                    return self._zero
                if a > b:
                    canon[j], canon[j + 1] = b, a
                    sign = -sign
            idx = tuple(canon)
        if depth == 0:
            val = self.omega[idx[0]][idx[1]]
            return val if sign > 0 else -val
        key = (depth, idx)
        val = self._memo.get(key)
        if val is None:
            val = self._expand(depth, idx)
            if len(self._memo) >= self.cache_limit:
                with self._lock:
                    self._memo.clear()
                    self.clears += 1
            self._memo[key] = val
        return val if sign > 0 else -val

    def _expand(self, depth: int, idx: tuple):
        a, b = idx[0], idx[1]
        rest = idx[2:]
        action = self.curvature.action[a][b]
        total = self._zero
        for pos, c in enumerate(rest):
            for l, weight in action[c]:
                sub = rest[:pos] + (l,) + rest[pos + 1:]
                val = self._value(depth - 1, sub)
                if not is_zero(val, 0.0):
                    total = total + weight * val
        return -total


def lazy_rk(R: CurvatureOperator, omega, k: int, **kwargs) -> LazyTensor:
    return LazyTensor(R, omega, k, **kwargs)


def eval_component(t: LazyTensor, idx: Sequence[int]):
    return t.component(idx)


# -- named quantities -----------------------------------------------------------

PAIR34 = (E3, E4)


@dataclass(frozen=True)
class NamedQuantity:
    """One of A, B, C, D (parameter k), E (k, i), T/U/Uhat (k, p, q, r).

    ``X`` and ``Y`` are 0-based basis indices or coefficient vectors.
    """

    tag: str
    k: int
    i: int | None = None
    p: int | None = None
    q: int | None = None
    r: int | None = None
    X: object = None
    Y: object = None

    def validate(self) -> None:
        tag, k = self.tag, self.k
        if tag not in ("A", "B", "C", "D", "E", "T", "U", "Uhat"):
            raise InvalidQuantity(f"invalid quantity parameters: unknown tag {tag!r}")
        if not isinstance(k, int) or k < 1:
            raise InvalidQuantity("invalid quantity parameters: k must be >= 1")
        if tag == "E":
            if self.i is None or not 1 <= self.i <= k + 1:
                raise InvalidQuantity("invalid quantity parameters: E needs 1 <= i <= k+1")
        if tag in ("T", "U", "Uhat"):
            pqr = (self.p, self.q, self.r)
            if any(v is None or v < 0 for v in pqr) or sum(pqr) != k - 1:
                raise InvalidQuantity("invalid quantity parameters: need p, q, r >= 0 with p+q+r = k-1")
        if tag in ("E", "T", "U", "Uhat") and (self.X is None or self.Y is None):
            raise InvalidQuantity("invalid quantity parameters: X and Y are required")


def abcd_index(tag: str, k: int) -> tuple:
    head = {
        "A": (E1, E4, E3, E4),
        "B": (E3, E4, E1, E4),
        "C": (E1, E3, E3, E4),
        "D": (E3, E4, E1, E3),
    }[tag]
    return head + PAIR34 * (k - 1)


def e_index(k: int, i: int, X: int, Y: int) -> tuple:
    pairs = [PAIR34] * (k + 1)
    pairs[i - 1] = (X, Y)
    return tuple(x for pair in pairs for x in pair)


def t_index(p: int, q: int, r: int, X: int, Y: int) -> tuple:
    return PAIR34 * p + (E1, X) + PAIR34 * q + (E1, Y) + PAIR34 * r


def _basis_expansion(v, n: int):
    """(index, coefficient) pairs of a basis index or coefficient vector."""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return [(int(v), 1)]
    return [(j, c) for j, c in enumerate(v) if not is_zero(c, 0.0)]


class QuantityEvaluator:
    """Evaluates named quantities of one model, sharing a single memo."""

    def __init__(self, model: PointModel, curvature: CurvatureOperator | None = None, **kwargs):
        self.model = model
        self.curvature = curvature or gauss_curvature(model)
        self.tensor = LazyTensor(self.curvature, model.omega, 0, **kwargs)

    def component(self, idx: Sequence[int]):
        idx = tuple(idx)
        if len(idx) % 2 or len(idx) < 2:
            raise IndexArityError(f"index arity mismatch: {len(idx)} indices")
        return self.tensor.with_depth(len(idx) // 2 - 1).component(idx)

    def _bilinear(self, build, X, Y):
        n = self.model.dim
        total = self.model.zero
        for x, cx in _basis_expansion(X, n):
            for y, cy in _basis_expansion(Y, n):
                val = self.component(build(x, y))
                if not is_zero(val, 0.0):
                    total = total + cx * cy * val
        return total

    def T(self, k, p, q, r, X, Y):
        return self._bilinear(lambda x, y: t_index(p, q, r, x, y), X, Y)

    def E(self, k, i, X, Y):
        return self._bilinear(lambda x, y: e_index(k, i, x, y), X, Y)

    def U(self, k, p, q, r, X, Y, hat: bool = False):
        h = self.model.h
        lam1 = self.model.S[E1][E1]
        total = self.model.zero
        for x, cx in _basis_expansion(X, self.model.dim):
            h3, h4 = h[x][E3], h[x][E4]
            if hat:
                t4, t3 = self.T(k, p, q, r, Y, E4), self.T(k, p, q, r, Y, E3)
            else:
                t4, t3 = self.T(k, p, q, r, E4, Y), self.T(k, p, q, r, E3, Y)
            total = total + cx * (-lam1 * h3 * t4 + lam1 * h4 * t3)
        return total

    def named(self, q: NamedQuantity):
        q.validate()
        if q.tag in ("A", "B", "C", "D"):
            return self.component(abcd_index(q.tag, q.k))
        if q.tag == "E":
            return self.E(q.k, q.i, q.X, q.Y)
        if q.tag == "T":
            return self.T(q.k, q.p, q.q, q.r, q.X, q.Y)
        return self.U(q.k, q.p, q.q, q.r, q.X, q.Y, hat=(q.tag == "Uhat"))

    def A(self, k):
        return self.component(abcd_index("A", k))

    def B(self, k):
        return self.component(abcd_index("B", k))

    def C(self, k):
        return self.component(abcd_index("C", k))

    def D(self, k):
        return self.component(abcd_index("D", k))

    def S_vector(self, j: int) -> list:
        """Coefficients of S e_j."""
        return [self.model.S[i][j] for i in range(self.model.dim)]


def eval_named(model: PointModel, q: NamedQuantity):
    return QuantityEvaluator(model).named(q)


def kind_of(model: PointModel) -> str:
    return scalar_kind(model.zero)
