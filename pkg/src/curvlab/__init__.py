"""Exact verification engine for iterated curvature actions R^k . omega.

Layers, bottom-up: :mod:`scalars` (rationals, polynomials, floats),
:mod:`tensors` (point models, canonical forms, basis changes),
:mod:`curvature` (Gauss curvature and the lazy R^k . omega evaluator),
:mod:`jets` (Taylor jets of connections), :mod:`lemmas` and :mod:`search`
(the executable checks) and :mod:`cli`.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .curvature import (
    CurvatureOperator,
    LazyTensor,
    NamedQuantity,
    QuantityEvaluator,
    curvature_action,
    dense_power,
    eval_component,
    eval_named,
    gauss_curvature,
    lazy_rk,
)
from .errors import (
    CurvlabError,
    IncompatibleScalarKinds,
    IndexArityError,
    InvalidQuantity,
    JetOrderError,
    MissingVariable,
    ModelInvariantError,
    SweepConfigError,
)
from .jets import JetModel, covariant_derivative, make_jet, random_jet, verify_signed_sum
from .lemmas import CHECKS, LemmaReport, SuiteConfig, run_check
from .scalars import Polynomial, evaluate, is_zero, parse_scalar, symbols
from .search import SweepSpec, run_sweep, theorem_search
from .tensors import (
    PointModel,
    apply_basis_change,
    canonical_form_a,
    canonical_form_b,
    make_point_model,
    model_from_json,
    model_to_json,
    block_basis_change,
)
