from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import HealthCheck, assume, settings
from hypothesis import strategies as st

from curvlab.scalars import Polynomial
from curvlab.tensors import LORENTZ_H, make_point_model, omega_from_entries

settings.register_profile("curvlab", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow, HealthCheck.large_base_example])
settings.load_profile("curvlab")

VARS = ("a", "b", "c")

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)
small_ints = st.integers(min_value=-3, max_value=3)


@st.composite
def polynomials(draw, variables=VARS, max_terms=4, max_exp=2):
    n = draw(st.integers(min_value=0, max_value=max_terms))
    terms = {}
    for _ in range(n):
        exps = tuple(draw(st.integers(min_value=0, max_value=max_exp)) for _ in variables)
        terms[exps] = terms.get(exps, 0) + draw(rationals)
    return Polynomial(variables, terms)


@st.composite
def rational_models(draw):
    """Random rational point models with h = diag(1,1,1,-1) and h-self-adjoint S."""
    # S = h^{-1} B with B symmetric is h-self-adjoint
    B = [[None] * 4 for _ in range(4)]
    for i in range(4):
        for j in range(i, 4):
            B[i][j] = B[j][i] = Fraction(draw(small_ints))
    S = [[B[i][j] * LORENTZ_H[i][i] for j in range(4)] for i in range(4)]
    # offsets from the standard form, so the all-zero draw is non-degenerate
    w = [Fraction(draw(small_ints)) for _ in range(6)]
    w[0] += 1
    w[5] += 1
    assume(w[0] * w[5] - w[1] * w[4] + w[2] * w[3] != 0)
    return make_point_model(4, LORENTZ_H, S, omega_from_entries(w))


@pytest.fixture
def standard_omega():
    return omega_from_entries([Fraction(1), 0, 0, 0, 0, Fraction(1)])
