"""Pointwise linear algebra: models of one tangent space and their invariants.

Matrices are tuples of row tuples. A shape operator ``S`` acts on column
vectors, so ``S e_j = sum_i S[i][j] e_i``; bilinear forms satisfy
``h(e_i, e_j) = h[i][j]``. Basis indices are 0-based in the library
(``e_1`` is index 0); the CLI and JSON files use 1-based labels.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import IncompatibleScalarKinds, ModelInvariantError
from .scalars import (
    DEFAULT_TOLERANCE,
    Polynomial,
    from_json,
    is_perfect_square,
    is_zero,
    rational_sqrt,
    scalar_kind,
    to_json,
)

OMEGA_NAMES = ("w12", "w13", "w14", "w23", "w24", "w34")

Matrix = tuple  # tuple[tuple[Scalar, ...], ...]


# -- small matrix helpers --------------------------------------------------

def as_matrix(rows) -> Matrix:
    return tuple(tuple(r) for r in rows)


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a))


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return tuple(tuple(sum((x * y for x, y in zip(row, col)), _zero_of(row[0])) for col in bt) for row in a)


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def _zero_of(x):
    kind = scalar_kind(x)
    if kind == "poly":
        return Polynomial.zero(x.variables)
    return 0.0 if kind == "float" else Fraction(0)


def matrix_kind(m: Matrix) -> str:
    kinds = {scalar_kind(x) for row in m for x in row}
    if "poly" in kinds and "float" in kinds:
        raise IncompatibleScalarKinds("poly", "float")
    if "poly" in kinds:
        return "poly"
    return "float" if "float" in kinds else "rational"


def determinant(m: Matrix):
    """Division-free Laplace expansion, memoized over column subsets."""
    n = len(m)
    if n == 0:
        return Fraction(1)
    memo: dict = {}

    def minor(row: int, cols: tuple):
        if row == n:
            return 1
        if cols in memo:
            return memo[cols]
        total = 0
        for pos, c in enumerate(cols):
            entry = m[row][c]
            if is_zero(entry, 0.0):
                continue
            sub = minor(row + 1, cols[:pos] + cols[pos + 1:])
            term = entry * sub
            total = total + term if pos % 2 == 0 else total - term
        memo[cols] = total
        return total

    result = minor(0, tuple(range(n)))
    if isinstance(result, int):
        result = _zero_of(m[0][0]) + result
    return result


def _numeric_rows(m: Matrix, what: str) -> list:
    rows = []
    for row in m:
        out = []
        for x in row:
            kind = scalar_kind(x)
            if kind == "poly":
                if not x.is_constant():
                    raise ValueError(f"{what} needs numeric entries; evaluate the symbolic matrix first")
                x = x.constant_term()
            elif kind == "rational":
                x = Fraction(x)
            out.append(x)
        rows.append(out)
    return rows


def _pivot_ok(x, tol: float) -> bool:
    return abs(x) > tol if isinstance(x, float) else x != 0


def rref(m: Matrix, tol: float = DEFAULT_TOLERANCE):
    """Reduced row echelon form over Q (exact) or floats (partial pivoting)."""
    a = _numeric_rows(m, "row reduction")
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        best = max(range(r, rows), key=lambda i: abs(a[i][c]))
        if not _pivot_ok(a[best][c], tol):
            continue
        a[r], a[best] = a[best], a[r]
        piv = a[r][c]
        a[r] = [x / piv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def nullspace(m: Matrix, tol: float = DEFAULT_TOLERANCE) -> list:
    """Basis of the right null space, one list per basis vector."""
    a, pivots = rref(m, tol)
    cols = len(m[0]) if m else 0
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for r, p in enumerate(pivots):
            v[p] = -a[r][f]
        basis.append(v)
    return basis


def inverse(m: Matrix, tol: float = DEFAULT_TOLERANCE) -> Matrix:
    n = len(m)
    a = _numeric_rows(m, "matrix inversion")
    one = 1.0 if any(isinstance(x, float) for row in a for x in row) else Fraction(1)
    aug = as_matrix([row + [one if i == j else one * 0 for j in range(n)] for i, row in enumerate(a)])
    red, pivots = rref(aug, tol)
    if pivots[:n] != list(range(n)):
        raise ModelInvariantError("basis change not invertible")
    return as_matrix(row[n:] for row in red)


@dataclass(frozen=True)
class RankReport:
    """Rank of a (possibly symbolic) matrix.

    ``critical_minors`` lists the nonzero minors of size ``generic_rank``; the
    rank drops exactly where all of them vanish.
    """

    generic_rank: int
    critical_minors: tuple = ()
    sample_ranks: tuple = ()


def rank(m: Matrix, tol: float = DEFAULT_TOLERANCE) -> int:
    if matrix_kind(m) == "poly" and not all(x.is_constant() for row in m for x in row if isinstance(x, Polynomial)):
        return symbolic_rank(m).generic_rank
    return len(rref(m, tol)[1])


def symbolic_rank(m: Matrix, samples: Sequence[Mapping[str, object]] = ()) -> RankReport:
    n_rows, n_cols = len(m), len(m[0]) if m else 0
    generic, minors = 0, ()
    for size in range(min(n_rows, n_cols), 0, -1):
        found = []
        for rows in itertools.combinations(range(n_rows), size):
            for cols in itertools.combinations(range(n_cols), size):
                d = determinant(tuple(tuple(m[i][j] for j in cols) for i in rows))
                if not is_zero(d):
                    found.append((rows, cols, d))
        if found:
            generic, minors = size, tuple(found)
            break
    sample_ranks = tuple(rank(evaluate_matrix(m, s)) for s in samples)
    return RankReport(generic, minors, sample_ranks)


def evaluate_matrix(m: Matrix, assignment: Mapping[str, object]) -> Matrix:
    return as_matrix([x.evaluate(assignment) if isinstance(x, Polynomial) else x for x in row] for row in m)


def signature(h: Matrix, tol: float = DEFAULT_TOLERANCE) -> tuple:
    """(positive, negative) inertia counts by symmetric congruence reduction."""
    a = _numeric_rows(h, "signature")
    n = len(a)
    pos = neg = 0
    idx = list(range(n))
    while idx:
        piv = next((i for i in idx if _pivot_ok(a[i][i], tol)), None)
        if piv is None:
            pair = next(((i, j) for i in idx for j in idx if i < j and _pivot_ok(a[i][j], tol)), None)
            if pair is None:
                raise ModelInvariantError("signature undefined: degenerate form")
            i, j = pair
            # e_i -> e_i + e_j makes the (i, i) entry 2 a_ij != 0
            for k in range(n):
                a[i][k] = a[i][k] + a[j][k]
            for k in range(n):
                a[k][i] = a[k][i] + a[k][j]
            piv = i
        d = a[piv][piv]
        if d > 0:
            pos += 1
        else:
            neg += 1
        idx.remove(piv)
        for i in idx:
            f = a[i][piv] / d
            if f != 0:
                for k in idx:
                    a[i][k] = a[i][k] - f * a[piv][k]
        for i in idx:
            a[i][piv] = a[piv][i] = 0
    return pos, neg


def pfaffian4(omega: Matrix):
    if len(omega) != 4:
        raise ValueError("pfaffian implemented for dim 4 only")
    w = omega
    return w[0][1] * w[2][3] - w[0][2] * w[1][3] + w[0][3] * w[1][2]


# -- point models ------------------------------------------------------------

@dataclass(frozen=True)
class PointModel:
    dim: int
    h: Matrix
    S: Matrix
    omega: Matrix
    kind: str = "rational"
    variables: tuple = ()
    sign_variables: tuple = field(default=(), compare=False)

    @property
    def zero(self):
        return self.omega[0][0]

    def entries(self):
        for m in (self.h, self.S, self.omega):
            for row in m:
                yield from row

    def as_float(self, assignment: Mapping[str, object] | None = None) -> "PointModel":
        def conv(x):
            if isinstance(x, Polynomial):
                x = x.evaluate(assignment or {})
            return float(x)

        mats = [as_matrix([conv(x) for x in row] for row in m) for m in (self.h, self.S, self.omega)]
        return PointModel(self.dim, *mats, kind="float", variables=())

    def substitute(self, assignment: Mapping[str, object]) -> "PointModel":
        """Bind some or all variables; a fully bound model becomes rational (or float)."""
        def conv(x):
            if not isinstance(x, Polynomial):
                return x
            y = x.subs(assignment)
            return y.constant_term() if y.is_constant() else y

        mats = [as_matrix([conv(x) for x in row] for row in m) for m in (self.h, self.S, self.omega)]
        signs = tuple(v for v in self.sign_variables if v not in assignment)
        return make_point_model(self.dim, *mats, check=False, sign_variables=signs)


def _unify(matrices, dim: int):
    kinds = set()
    variables: list = []
    for m in matrices:
        if len(m) != dim or any(len(row) != dim for row in m):
            raise ModelInvariantError("shape mismatch", f"expected {dim}x{dim} matrices")
        for row in m:
            for x in row:
                k = scalar_kind(x)
                kinds.add(k)
                if k == "poly":
                    variables.extend(v for v in x.variables if v not in variables)
    if "poly" in kinds and "float" in kinds:
        raise IncompatibleScalarKinds("poly", "float")
    if "poly" in kinds:
        kind = "poly"
    elif "float" in kinds:
        kind = "float"
    else:
        kind = "rational"
    variables = tuple(variables)

    def conv(x):
        if kind == "poly":
            return x.with_variables(variables) if isinstance(x, Polynomial) else Polynomial.constant(x, variables)
        if kind == "float":
            return float(x)
        return Fraction(x)

    return kind, variables, [as_matrix([conv(x) for x in row] for row in m) for m in matrices]


def make_point_model(dim: int, h, S, omega, *, check: bool = True, tol: float = DEFAULT_TOLERANCE,
                     sign_variables: Sequence[str] = ()) -> PointModel:
    """Validate and freeze (h, S, omega).

    Symbolic non-degeneracy means the determinant is not the zero polynomial.
    """
    if dim < 2 or dim % 2:
        raise ModelInvariantError("dimension must be even and at least 2")
    kind, variables, (h, S, omega) = _unify([h, S, omega], dim)
    model = PointModel(dim, h, S, omega, kind, variables, tuple(sign_variables))
    if not check:
        return model

    def zero(x):
        return is_zero(x, tol)

    if not all(zero(h[i][j] - h[j][i]) for i in range(dim) for j in range(dim)):
        raise ModelInvariantError("h not symmetric")
    if not all(zero(omega[i][j] + omega[j][i]) for i in range(dim) for j in range(dim)):
        raise ModelInvariantError("omega not antisymmetric")
    if zero(determinant(h)):
        raise ModelInvariantError("h degenerate")
    w_det = pfaffian4(omega) if dim == 4 else determinant(omega)
    if zero(w_det):
        raise ModelInvariantError("omega degenerate")
    hs = mat_mul(h, S)
    if not all(zero(hs[i][j] - hs[j][i]) for i in range(dim) for j in range(dim)):
        raise ModelInvariantError("S not h-self-adjoint")
    return model


def symbolic_omega(variables: Sequence[str] | None = None) -> Matrix:
    variables = tuple(variables) if variables is not None else OMEGA_NAMES
    w = {}
    for name in OMEGA_NAMES:
        i, j = int(name[1]) - 1, int(name[2]) - 1
        w[i, j] = Polynomial.generator(name, variables)
        w[j, i] = -w[i, j]
    zero = Polynomial.zero(variables)
    return as_matrix([w.get((i, j), zero) for j in range(4)] for i in range(4))


def omega_from_entries(entries: Mapping[str, object] | Sequence) -> Matrix:
    """Antisymmetric 4x4 matrix from w12, w13, w14, w23, w24, w34."""
    if not isinstance(entries, Mapping):
        entries = dict(zip(OMEGA_NAMES, entries))
    vals = {}
    sample = next(iter(entries.values()))
    zero = _zero_of(sample)
    for name in OMEGA_NAMES:
        i, j = int(name[1]) - 1, int(name[2]) - 1
        x = entries.get(name, zero)
        vals[i, j], vals[j, i] = x, -x
    return as_matrix([vals.get((i, j), zero) for j in range(4)] for i in range(4))


LORENTZ_H = ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, -1))


def _param(value, name: str, variables: tuple):
    if isinstance(value, str):
        return Polynomial.generator(value, variables)
    return value


def canonical_form_a(l1="l1", l2="l2", l3="l3", l4="l4", omega=None, *, check: bool = True) -> PointModel:
    """Diagonal shape operator with the Lorentzian h = diag(1, 1, 1, -1).

    Parameters given as strings become polynomial variables; ``omega=None``
    means the fully symbolic form with entries w12 ... w34.
    """
    names = tuple(v for v in (l1, l2, l3, l4) if isinstance(v, str))
    variables = names + (OMEGA_NAMES if omega is None else ())
    lam = [_param(v, "", variables) for v in (l1, l2, l3, l4)]
    zero = 0
    S = [[lam[i] if i == j else zero for j in range(4)] for i in range(4)]
    if omega is None:
        omega = symbolic_omega(variables)
    return make_point_model(4, LORENTZ_H, S, omega, check=check)


def canonical_form_b(l1="l1", l2="l2", gamma="gamma", s: int | None = 1, *, alpha=None, beta=None,
                     omega=None, check: bool = True) -> PointModel:
    """Shape operator with the 2x2 block [[alpha, gamma], [-gamma, beta]] on e3, e4.

    With ``s`` in {+1, -1} and no explicit alpha/beta the block is specialized
    to alpha = s*gamma, beta = -s*gamma. Pass ``s=None`` together with alpha and
    beta (numbers or variable names) for the free family.
    """
    if s is None and (alpha is None or beta is None):
        alpha = "alpha" if alpha is None else alpha
        beta = "beta" if beta is None else beta
    names = tuple(v for v in (l1, l2, alpha, beta, gamma) if isinstance(v, str))
    variables = names + (OMEGA_NAMES if omega is None else ())
    l1, l2, gamma = (_param(v, "", variables) for v in (l1, l2, gamma))
    if is_zero(gamma):
        raise ModelInvariantError("gamma must be nonzero")
    if alpha is None and beta is None:
        if s not in (1, -1):
            raise ValueError("s must be +1 or -1")
        alpha, beta = s * gamma, -s * gamma
    else:
        alpha, beta = _param(alpha, "", variables), _param(beta, "", variables)
    S = [
        [l1, 0, 0, 0],
        [0, l2, 0, 0],
        [0, 0, alpha, gamma],
        [0, 0, -gamma, beta],
    ]
    if omega is None:
        omega = symbolic_omega(variables)
    return make_point_model(4, LORENTZ_H, S, omega, check=check)


def omega_pfaffian(model: PointModel):
    if model.dim != 4:
        raise ValueError("pfaffian implemented for dim 4 only")
    return pfaffian4(model.omega)


# -- basis changes -------------------------------------------------------------

def apply_basis_change(model: PointModel, P, *, check: bool = True) -> PointModel:
    """New basis e'_j = sum_i P[i][j] e_i: congruence on h, omega; conjugation on S."""
    P = as_matrix(P)
    p_kind = matrix_kind(P)
    if p_kind == "poly":
        raise ValueError("basis change matrices must be numeric")
    if p_kind == "float" and model.kind == "rational":
        model = model.as_float()
    if p_kind == "float" and model.kind == "poly":
        raise IncompatibleScalarKinds("poly", "float")
    P = as_matrix([float(x) if p_kind == "float" else Fraction(x) for x in row] for row in P)
    try:
        P_inv = inverse(P)
    except ZeroDivisionError:  # pragma: no cover - rref never divides by zero
        raise ModelInvariantError("basis change not invertible")
    Pt = transpose(P)
    h = mat_mul(mat_mul(Pt, model.h), P)
    omega = mat_mul(mat_mul(Pt, model.omega), P)
    S = mat_mul(mat_mul(P_inv, model.S), P)
    return make_point_model(model.dim, h, S, omega, check=check)


def apply_scaled_basis_change(model: PointModel, Q, scales, *, check: bool = True) -> PointModel:
    """Change of basis by P[:, j] = Q[:, j] / sqrt(scales[j]) without forming roots.

    An entry of the result picks up sqrt(c_i c_j) (h, omega) or
    sqrt(c_j / c_i) (S); every such factor on a nonzero entry must be a
    rational square, which holds e.g. for block-diagonal data.
    """
    Q = as_matrix([Fraction(x) for x in row] for row in as_matrix(Q))
    c = [Fraction(x) for x in scales]
    if any(x <= 0 for x in c):
        raise ValueError("scales must be positive")
    Q_inv = inverse(Q)
    Qt = transpose(Q)
    n = model.dim

    def rescale(m: Matrix, factor) -> Matrix:
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                x = m[i][j]
                if is_zero(x):
                    row.append(x)
                    continue
                f = factor(i, j)
                if not is_perfect_square(f):
                    raise ModelInvariantError("basis change leaves the rationals")
                r = rational_sqrt(f)
                row.append(x * r)
            out.append(row)
        return as_matrix(out)

    congruence = lambda i, j: 1 / (c[i] * c[j])
    h = rescale(mat_mul(mat_mul(Qt, model.h), Q), congruence)
    omega = rescale(mat_mul(mat_mul(Qt, model.omega), Q), congruence)
    S = rescale(mat_mul(mat_mul(Q_inv, model.S), Q), lambda i, j: c[i] / c[j])
    return make_point_model(model.dim, h, S, omega, check=check)


def block_scaling(beta, gamma) -> tuple:
    """(Q, column scales) such that P[:, j] = Q[:, j] / sqrt(scales[j]) is the block change below."""
    beta, gamma = Fraction(beta), Fraction(gamma)
    d = beta * beta - gamma * gamma
    if d == 0:
        raise ValueError("beta^2 - gamma^2 must be nonzero")
    one, zero = Fraction(1), Fraction(0)
    Q = ((one, zero, zero, zero), (zero, one, zero, zero), (zero, zero, gamma, beta), (zero, zero, beta, gamma))
    return Q, (one, one, abs(d), abs(d))


def block_basis_change(beta, gamma, *, exact: bool = True) -> Matrix:
    """The block change e3' = (gamma e3 + beta e4)/r, e4' = (beta e3 + gamma e4)/r.

    r = sqrt(|beta^2 - gamma^2|). Exact mode requires r to be rational.
    """
    d = beta * beta - gamma * gamma
    if d == 0:
        raise ValueError("beta^2 - gamma^2 must be nonzero")
    if exact:
        r = rational_sqrt(abs(Fraction(d)))
        one = Fraction(1)
        gamma, beta = Fraction(gamma), Fraction(beta)
    else:
        r = abs(float(d)) ** 0.5
        one = 1.0
        gamma, beta = float(gamma), float(beta)
    zero = one * 0
    return (
        (one, zero, zero, zero),
        (zero, one, zero, zero),
        (zero, zero, gamma / r, beta / r),
        (zero, zero, beta / r, gamma / r),
    )


# -- JSON model files ------------------------------------------------------------

def model_from_json(doc: Mapping, *, check: bool = True) -> PointModel:
    """Build a model from the JSON schema used by the CLI.

    Raises KeyError/ValueError with a field path for malformed documents and
    ModelInvariantError for well-formed but invalid models.
    """
    if not isinstance(doc, Mapping):
        raise ValueError("$: expected a JSON object")
    try:
        dim = doc["dim"]
    except KeyError:
        raise ValueError("$.dim: missing") from None
    if not isinstance(dim, int) or isinstance(dim, bool):
        raise ValueError("$.dim: expected an integer")
    kind = doc.get("scalars", "rational")
    if kind not in ("rational", "poly", "float"):
        raise ValueError("$.scalars: expected one of rational, poly, float")
    variables = tuple(doc.get("variables", ()))
    if kind != "poly" and variables:
        kind = "poly"
    mats = []
    for name in ("h", "S", "omega"):
        if name not in doc:
            raise ValueError(f"$.{name}: missing")
        rows = doc[name]
        if not isinstance(rows, list) or len(rows) != dim:
            raise ValueError(f"$.{name}: expected {dim} rows")
        mat = []
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != dim:
                raise ValueError(f"$.{name}[{i}]: expected {dim} entries")
            out = []
            for j, x in enumerate(row):
                try:
                    out.append(from_json(x, variables, kind))
                except (ValueError, TypeError, KeyError) as exc:
                    raise ValueError(f"$.{name}[{i}][{j}]: {exc}") from None
            mat.append(out)
        mats.append(mat)
    sign_vars = tuple(doc.get("sign_variables", ()))
    return make_point_model(dim, *mats, check=check, sign_variables=sign_vars)


def model_to_json(model: PointModel) -> dict:
    doc = {
        "dim": model.dim,
        "scalars": model.kind,
        "h": [[to_json(x) for x in row] for row in model.h],
        "S": [[to_json(x) for x in row] for row in model.S],
        "omega": [[to_json(x) for x in row] for row in model.omega],
    }
    if model.kind == "poly":
        doc["variables"] = list(model.variables)
    if model.sign_variables:
        doc["sign_variables"] = list(model.sign_variables)
    return doc
