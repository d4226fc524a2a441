"""Coefficient rings: exact rationals, sparse polynomials over Q, and floats.

Rationals are plain :class:`fractions.Fraction` (Python ints are accepted
wherever a rational is). :class:`Polynomial` is a sparse map from exponent
vectors to nonzero rational coefficients and is the workhorse of every
symbolic identity check. Floats are ordinary Python floats and exist only for
numeric sweeps.
"""

from __future__ import annotations

import ast
import math
import operator
from fractions import Fraction
from numbers import Rational as _RationalABC
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence, Union

from .errors import IncompatibleScalarKinds, MissingVariable

DEFAULT_TOLERANCE = 1e-9

Exponents = tuple  # tuple[int, ...], one entry per variable


class Polynomial:
    """Sparse multivariate polynomial with rational coefficients.

    The term map never stores a zero coefficient, so two polynomials over the
    same variable list are equal exactly when their term maps are. Arithmetic
    between polynomials over different variable lists embeds both into the
    merged list (left operand's variables first).
    """

    __slots__ = ("variables", "_terms")

    def __init__(self, variables: Sequence[str], terms: Mapping[Sequence[int], object] | None = None):
        self.variables = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"duplicate variable names in {self.variables}")
        n = len(self.variables)
        clean: dict = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != n:
                raise ValueError(f"exponent vector {exps} does not match {n} variables")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            c = clean.get(exps, 0) + _as_rational(coeff)
            if c:
                clean[exps] = c
            else:
                clean.pop(exps, None)
        self._terms = clean

    @classmethod
    def _raw(cls, variables: tuple, terms: dict) -> "Polynomial":
        # trusted constructor: terms already canonical
        p = object.__new__(cls)
        p.variables = variables
        p._terms = terms
        return p

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, variables: Sequence[str] = ()) -> "Polynomial":
        return cls._raw(tuple(variables), {})

    @classmethod
    def constant(cls, value, variables: Sequence[str] = ()) -> "Polynomial":
        variables = tuple(variables)
        c = _as_rational(value)
        return cls._raw(variables, {(0,) * len(variables): c} if c else {})

    @classmethod
    def generator(cls, name: str, variables: Sequence[str] | None = None) -> "Polynomial":
        variables = tuple(variables) if variables is not None else (name,)
        if name not in variables:
            raise ValueError(f"{name!r} is not one of {variables}")
        exps = tuple(1 if v == name else 0 for v in variables)
        return cls._raw(variables, {exps: 1})

    # -- inspection -------------------------------------------------------
    @property
    def terms(self) -> Mapping[tuple, Fraction]:
        return MappingProxyType({e: Fraction(c) for e, c in self._terms.items()})

    @property
    def n_terms(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and not any(next(iter(self._terms))))

    def constant_term(self) -> Fraction:
        return Fraction(self._terms.get((0,) * len(self.variables), 0))

    def total_degree(self) -> int:
        return max((sum(e) for e in self._terms), default=-1)

    def used_variables(self) -> tuple:
        used = [False] * len(self.variables)
        for exps in self._terms:
            for i, e in enumerate(exps):
                if e:
                    used[i] = True
        return tuple(v for v, u in zip(self.variables, used) if u)

    def involves(self, names: Iterable[str]) -> bool:
        return bool(set(names) & set(self.used_variables()))

    def sorted_terms(self) -> list:
        """Terms in graded-lexicographic order, highest degree first."""
        return sorted(self._terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    def monomial_key(self, exps: tuple) -> str:
        parts = []
        for v, e in zip(self.variables, exps):
            if e == 1:
                parts.append(v)
            elif e:
                parts.append(f"{v}^{e}")
        return "*".join(parts) if parts else "1"

    # -- alignment --------------------------------------------------------
    def with_variables(self, variables: Sequence[str]) -> "Polynomial":
        """Re-express over ``variables`` (must contain every used variable)."""
        variables = tuple(variables)
        if variables == self.variables:
            return self
        pos = {v: i for i, v in enumerate(variables)}
        for v in self.used_variables():
            if v not in pos:
                raise ValueError(f"variable {v!r} not in target list {variables}")
        index = [pos.get(v) for v in self.variables]
        n = len(variables)
        out = {}
        for exps, c in self._terms.items():
            new = [0] * n
            for i, e in enumerate(exps):
                if e:
                    new[index[i]] = e
            out[tuple(new)] = c
        return Polynomial._raw(variables, out)

    def _aligned(self, other: "Polynomial"):
        if self.variables is other.variables or self.variables == other.variables:
            return self.variables, self._terms, other._terms
        merged = self.variables + tuple(v for v in other.variables if v not in self.variables)
        return merged, self.with_variables(merged)._terms, other.with_variables(merged)._terms

    def _lift(self, value) -> "Polynomial":
        if isinstance(value, Polynomial):
            return value
        kind = scalar_kind(value)
        if kind != "rational":
            raise IncompatibleScalarKinds("poly", kind)
        return Polynomial.constant(value, self.variables)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            if isinstance(other, float):
                raise
            return NotImplemented
        variables, a, b = self._aligned(other)
        if len(a) < len(b):
            a, b = b, a
        out = dict(a)
        for e, c in b.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                del out[e]
        return Polynomial._raw(variables, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.variables, {e: -c for e, c in self._terms.items()})

    def __pos__(self) -> "Polynomial":
        return self

    def __sub__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            if isinstance(other, float):
                raise
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return self._lift(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            kind = _kind_or_none(other)
            if kind == "rational":
                if not other:
                    return Polynomial._raw(self.variables, {})
                return Polynomial._raw(self.variables, {e: c * other for e, c in self._terms.items()})
            if kind == "float":
                raise IncompatibleScalarKinds("poly", "float")
            return NotImplemented
        variables, a, b = self._aligned(other)
        if len(a) < len(b):
            a, b = b, a
        out: dict = {}
        get = out.get
        add = operator.add
        for eb, cb in b.items():
            for ea, ca in a.items():
                e = tuple(map(add, ea, eb))
                c = get(e, 0) + ca * cb
                if c:
                    out[e] = c
                else:
                    del out[e]
        return Polynomial._raw(variables, out)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Polynomial":
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        result = Polynomial.constant(1, self.variables)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return (self - other).is_zero()
        if _kind_or_none(other) == "rational":
            return (self - other).is_zero()
        return NotImplemented

    def __hash__(self) -> int:
        sparse = frozenset(
            (tuple((v, e) for v, e in zip(self.variables, exps) if e), Fraction(c))
            for exps, c in self._terms.items()
        )
        return hash(sparse)

    # -- substitution and calculus -----------------------------------------
    def subs(self, mapping: Mapping[str, object]) -> "Polynomial":
        """Substitute rationals or polynomials for some variables."""
        if not mapping:
            return self
        keep = tuple(v for v in self.variables if v not in mapping)
        keep_idx = [i for i, v in enumerate(self.variables) if v not in mapping]
        repl = [(i, mapping[v]) for i, v in enumerate(self.variables) if v in mapping]
        poly_values = [val for _, val in repl if isinstance(val, Polynomial)]
        target = keep
        for pv in poly_values:
            target = target + tuple(v for v in pv.variables if v not in target)
        powers: dict = {}
        result = Polynomial.zero(target)
        for exps, c in self._terms.items():
            mono = Polynomial._raw(target, {tuple(exps[i] for i in keep_idx) + (0,) * (len(target) - len(keep)): c})
            for i, val in repl:
                e = exps[i]
                if not e:
                    continue
                key = (i, e)
                if key not in powers:
                    if isinstance(val, Polynomial):
                        powers[key] = val.with_variables(target) ** e
                    else:
                        if scalar_kind(val) != "rational":
                            raise IncompatibleScalarKinds("poly", scalar_kind(val))
                        powers[key] = Fraction(val) ** e
                mono = mono * powers[key]
            result = result + mono
        return result

    def evaluate(self, assignment: Mapping[str, object]):
        """Full substitution; returns a Fraction (or a float if any value is a float)."""
        for v in self.used_variables():
            if v not in assignment:
                raise MissingVariable(v)
        values = [assignment.get(v, 0) for v in self.variables]
        total = 0
        for exps, c in self._terms.items():
            term = c
            for val, e in zip(values, exps):
                if e:
                    term = term * val**e
            total = total + term
        if isinstance(total, float):
            return total
        return Fraction(total)

    def diff(self, name: str) -> "Polynomial":
        if name not in self.variables:
            return Polynomial._raw(self.variables, {})
        i = self.variables.index(name)
        out = {}
        for exps, c in self._terms.items():
            e = exps[i]
            if e:
                out[exps[:i] + (e - 1,) + exps[i + 1:]] = c * e
        return Polynomial._raw(self.variables, out)

    def truncate(self, max_degree: int) -> "Polynomial":
        return Polynomial._raw(self.variables, {e: c for e, c in self._terms.items() if sum(e) <= max_degree})

    def reduce_involutions(self, names: Iterable[str]) -> "Polynomial":
        """Reduce modulo s^2 = 1 for every listed sign variable s."""
        idx = [self.variables.index(n) for n in names if n in self.variables]
        if not idx:
            return self
        out: dict = {}
        for exps, c in self._terms.items():
            new = list(exps)
            for i in idx:
                new[i] %= 2
            key = tuple(new)
            s = out.get(key, 0) + c
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        return Polynomial._raw(self.variables, out)

    # -- display ----------------------------------------------------------
    def __str__(self) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for exps, c in self.sorted_terms():
            c = Fraction(c)
            mono = self.monomial_key(exps)
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if mono == "1":
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            pieces.append((sign, body))
        first_sign, first = pieces[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"Polynomial({str(self)!r}, variables={self.variables})"


Scalar = Union[int, Fraction, Polynomial, float]


def symbols(*names: str) -> tuple:
    """Generators sharing one variable list, e.g. ``a, b = symbols("a", "b")``."""
    if len(names) == 1 and not isinstance(names[0], str):
        names = tuple(names[0])
    return tuple(Polynomial.generator(n, names) for n in names)


def _as_rational(value):
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value
    if isinstance(value, _RationalABC):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        return Fraction(value)
    raise IncompatibleScalarKinds("rational", type(value).__name__)


def _kind_or_none(x) -> str | None:
    if isinstance(x, Polynomial):
        return "poly"
    if isinstance(x, bool):
        return "rational"
    if isinstance(x, (int, Fraction)) or isinstance(x, _RationalABC):
        return "rational"
    if isinstance(x, float):
        return "float"
    return None


def scalar_kind(x) -> str:
    """``"rational"``, ``"poly"`` or ``"float"``."""
    kind = _kind_or_none(x)
    if kind is None:
        raise TypeError(f"not a scalar: {x!r}")
    return kind


_OPS = {
    "add": operator.add,
    "sub": operator.sub,
    "mul": operator.mul,
}


def ring_arith(a, b, op: str):
    """Apply ``op`` in {add, sub, mul, neg} with strict kind checking.

    Rational and polynomial operands mix (the rational is promoted); any other
    pairing of different kinds raises :class:`IncompatibleScalarKinds`.
    ``b`` is ignored for ``neg``.
    """
    ka = scalar_kind(a)
    if op == "neg":
        return Fraction(-a) if ka == "rational" else -a
    kb = scalar_kind(b)
    if ka != kb and {ka, kb} != {"rational", "poly"}:
        raise IncompatibleScalarKinds(ka, kb)
    try:
        fn = _OPS[op]
    except KeyError:
        raise ValueError(f"unknown ring operation {op!r}") from None
    result = fn(a, b)
    return Fraction(result) if ka == kb == "rational" else result


def is_zero(a, tol: float = DEFAULT_TOLERANCE) -> bool:
    """Exact zero test for rationals/polynomials, ``|a| <= tol`` for floats."""
    kind = scalar_kind(a)
    if kind == "float":
        return abs(a) <= tol
    if kind == "poly":
        return a.is_zero()
    return a == 0


def evaluate(p, assignment: Mapping[str, object]):
    if isinstance(p, Polynomial):
        return p.evaluate(assignment)
    if scalar_kind(p) == "rational":
        return Fraction(p)
    return p


def zero_like(x):
    kind = scalar_kind(x)
    if kind == "poly":
        return Polynomial.zero(x.variables)
    if kind == "float":
        return 0.0
    return Fraction(0)


# -- serialization --------------------------------------------------------

def rational_to_str(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def to_json(x):
    """JSON form: rationals as "num/den", polynomials as {monomial: "num/den"}."""
    kind = scalar_kind(x)
    if kind == "rational":
        return rational_to_str(x)
    if kind == "float":
        return float(x)
    return {x.monomial_key(e): rational_to_str(c) for e, c in x.sorted_terms()}


def from_json(obj, variables: Sequence[str] | None = None, kind: str | None = None):
    """Inverse of :func:`to_json`; strings are parsed as expressions."""
    if isinstance(obj, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(obj, dict):
        variables = tuple(variables or ())
        result = Polynomial.zero(variables)
        for mono, coeff in obj.items():
            term = Polynomial.constant(_as_rational(coeff), variables)
            if mono != "1":
                for factor in mono.split("*"):
                    name, _, power = factor.partition("^")
                    term = term * Polynomial.generator(name.strip(), variables) ** (int(power) if power else 1)
            result = result + term
        return result
    if isinstance(obj, float):
        if kind not in (None, "float"):
            raise IncompatibleScalarKinds(kind, "float")
        return obj
    if isinstance(obj, int):
        if kind == "float":
            return float(obj)
        if kind == "poly":
            return Polynomial.constant(obj, variables or ())
        return Fraction(obj)
    if isinstance(obj, str):
        return parse_scalar(obj, variables, kind)
    raise TypeError(f"cannot interpret {obj!r} as a scalar")


def parse_scalar(text: str, variables: Sequence[str] | None = None, kind: str | None = None):
    """Parse "3/4", "-gamma", "l1^2*w13 - 2", ... into a scalar.

    With ``kind="float"`` numbers become floats; with variables present (or
    ``kind="poly"``) the result is a Polynomial over ``variables``.
    """
    variables = tuple(variables or ())
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse scalar expression {text!r}") from exc

    def number(value):
        if kind == "float":
            return float(value)
        if isinstance(value, float):
            raise IncompatibleScalarKinds(kind or "rational", "float")
        return Fraction(value)

    def walk(node):
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            return number(node.value)
        if isinstance(node, ast.Name):
            if kind == "float":
                raise ValueError(f"symbol {node.id!r} in a float model")
            if node.id not in variables:
                raise MissingVariable(node.id)
            return Polynomial.generator(node.id, variables)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            val = walk(node.operand)
            return -val if isinstance(node.op, ast.USub) else val
        if isinstance(node, ast.BinOp):
            left, right = walk(node.left), walk(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            if isinstance(node.op, ast.Div):
                if isinstance(right, Polynomial):
                    if not right.is_constant():
                        raise ValueError("division by a non-constant polynomial")
                    right = right.constant_term()
                if isinstance(left, Polynomial):
                    return left * (1 / Fraction(right))
                return left / right
            if isinstance(node.op, ast.Pow):
                if isinstance(right, Polynomial):
                    right = right.constant_term()
                if right != int(right) or right < 0:
                    raise ValueError("exponents must be non-negative integers")
                return left ** int(right)
        raise ValueError(f"unsupported syntax in scalar expression {text!r}")

    value = walk(tree)
    if kind == "poly" and not isinstance(value, Polynomial):
        return Polynomial.constant(value, variables)
    return value


def is_perfect_square(q) -> bool:
    q = Fraction(q)
    if q < 0:
        return False
    return math.isqrt(q.numerator) ** 2 == q.numerator and math.isqrt(q.denominator) ** 2 == q.denominator


def rational_sqrt(q) -> Fraction:
    q = Fraction(q)
    if not is_perfect_square(q):
        raise ValueError(f"{q} is not the square of a rational")
    return Fraction(math.isqrt(q.numerator), math.isqrt(q.denominator))
