"""Command line front end: ``curvlab verify | eval | search | jet | report-merge``.

Exit codes: 0 all checks pass, 1 a residual or violator is nonzero, 2 usage or
configuration error, 3 a model invariant is violated.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from .curvature import NamedQuantity, QuantityEvaluator
from .errors import CurvlabError, ModelInvariantError, SweepConfigError
from .jets import iter_trials, jet_from_json, random_jet, verify_signed_sum
from .lemmas import CHECKS, DEFAULT_K_MAX, LemmaReport, SuiteConfig, run_check, sort_reports
from .scalars import DEFAULT_TOLERANCE, Polynomial, parse_scalar, scalar_kind
from .search import SweepSpec, theorem_search
from .tensors import model_from_json

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INVARIANT = 0, 1, 2, 3
SIGN_CHOICES = {"+": (1,), "-": (-1,), "both": (1, -1)}


class UsageError(CurvlabError):
    pass


@dataclass
class RunConfig:
    command: str
    inputs: list = field(default_factory=list)
    k_max: int = DEFAULT_K_MAX
    signs: tuple = (1, -1)
    mode: str = "exact"
    tolerance: float = DEFAULT_TOLERANCE
    seed: int = 0
    parallelism: int = 1
    out: str | None = None
    timing: bool = True

    def __post_init__(self):
        if self.tolerance <= 0:
            raise UsageError("--tol must be positive")
        if self.parallelism < 1:
            raise UsageError("--parallelism must be >= 1")
        if self.k_max < 1:
            raise UsageError("--k-max must be >= 1")


# -- output helpers ------------------------------------------------------------------

def dump_reports(reports: list, cfg: RunConfig) -> None:
    text = json.dumps(reports, indent=2, sort_keys=True) + "\n"
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
        for r in reports:
            params = ",".join(f"{k}={v}" for k, v in sorted(r["params"].items()))
            print(f"{r['verdict'].upper():4}  {r['lemma']}  {params}")
    else:
        sys.stdout.write(text)


def _exit_for(reports: list) -> int:
    return EXIT_OK if all(r["verdict"] == "pass" for r in reports) else EXIT_FAIL


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


# -- verify -----------------------------------------------------------------------------

def _verify_one(args) -> list:
    lemma_id, suite = args
    return [r.to_json() for r in run_check(lemma_id, suite)]


def cmd_verify(cfg: RunConfig, lemma: str) -> int:
    ids = list(CHECKS) if lemma == "all" else [lemma]
    if lemma != "all" and lemma not in CHECKS:
        raise UsageError(f"unknown lemma id {lemma!r}; valid ids: all, " + ", ".join(CHECKS))
    if cfg.mode != "exact":
        raise UsageError("verify runs exact checks only; use `search` for float sweeps")
    suite = SuiteConfig(k_max=cfg.k_max, signs=cfg.signs, seed=cfg.seed, tolerance=cfg.tolerance)
    jobs = [(i, suite) for i in ids]
    if cfg.parallelism > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(cfg.parallelism, len(jobs))) as pool:
            groups = list(pool.map(_verify_one, jobs))
    else:
        groups = [_verify_one(j) for j in jobs]
    reports = sort_reports([r for g in groups for r in g])
    if not cfg.timing:
        for r in reports:
            r["ms"] = None
    dump_reports(reports, cfg)
    return _exit_for(reports)


# -- eval ---------------------------------------------------------------------------------

_PARAM = re.compile(r"(\w+)=(.+?)(?=,\w+=|$)")
QUANTITY_KEYS = {
    "A": {"k"}, "B": {"k"}, "C": {"k"}, "D": {"k"},
    "E": {"k", "i", "X", "Y"},
    "T": {"k", "p", "q", "r", "X", "Y"}, "U": {"k", "p", "q", "r", "X", "Y"}, "Uhat": {"k", "p", "q", "r", "X", "Y"},
    "component": {"idx"},
}


def parse_quantity(text: str):
    """"A:k=1", "T:k=2,p=0,q=0,r=1,X=3,Y=3", "component:idx=1,2,3,4" (1-based indices).

    Returns a NamedQuantity or a 0-based index tuple for raw components.
    """
    tag, sep, rest = text.partition(":")
    tag = tag.strip()
    if tag not in QUANTITY_KEYS:
        raise UsageError(f"unknown quantity {tag!r}; expected one of " + ", ".join(QUANTITY_KEYS))
    params = {}
    pos = 0
    for m in _PARAM.finditer(rest):
        if m.start() != pos:
            break
        params[m.group(1)] = m.group(2)
        pos = m.end() + 1
    if pos < len(rest):
        raise UsageError(f"cannot parse quantity parameters {rest!r}")
    extra = set(params) - QUANTITY_KEYS[tag] - ({"k"} if tag == "component" else set())
    if extra:
        raise UsageError(f"unexpected parameters for {tag}: {', '.join(sorted(extra))}")
    try:
        if tag == "component":
            if "idx" not in params:
                raise UsageError("component needs idx=i1,i2,...")
            idx = tuple(int(x) - 1 for x in params["idx"].split(","))
            if "k" in params and len(idx) != 2 * int(params["k"]) + 2:
                raise UsageError(f"index arity mismatch: k={params['k']} needs {2 * int(params['k']) + 2} indices")
            return idx
        ints = {key: int(val) for key, val in params.items()}
    except ValueError:
        raise UsageError(f"quantity parameters must be integers: {rest!r}") from None
    missing = QUANTITY_KEYS[tag] - set(ints)
    if missing:
        raise UsageError(f"missing parameters for {tag}: {', '.join(sorted(missing))}")
    for axis in ("X", "Y"):
        if axis in ints:
            ints[axis] -= 1
    return NamedQuantity(tag, **ints)


def _assignment(pairs: list, variables: tuple) -> dict:
    out = {}
    for item in pairs or ():
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--set expects name=value, got {item!r}")
        out[name.strip()] = parse_scalar(value.strip())
    unknown = set(out) - set(variables)
    if unknown:
        raise UsageError(f"--set names unknown variables: {', '.join(sorted(unknown))}")
    return out


def cmd_eval(cfg: RunConfig, model_path: str, quantity: str, assign: list) -> int:
    try:
        model = model_from_json(_read_json(model_path))
    except ModelInvariantError:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"{model_path}: {exc}") from None
    q = parse_quantity(quantity)
    values = _assignment(assign, model.variables)
    if values:
        model = model.substitute(values)
    if cfg.mode == "float":
        model = model.as_float({})  # unbound variables surface as MissingVariable
    ev = QuantityEvaluator(model)
    value = ev.component(q) if isinstance(q, tuple) else ev.named(q)
    if isinstance(value, Polynomial) and model.sign_variables:
        value = value.reduce_involutions(model.sign_variables)
    if scalar_kind(value) == "rational":
        value = Fraction(value)
        print(str(value))
    elif isinstance(value, Polynomial) and value.is_constant():
        print(str(value.constant_term()))
    else:
        print(str(value))
    return EXIT_OK


# -- search ---------------------------------------------------------------------------------

def cmd_search(cfg: RunConfig, sweep_path: str | None, overrides: dict) -> int:
    doc = _read_json(sweep_path) if sweep_path else {}
    if not isinstance(doc, dict):
        raise UsageError("$: sweep must be a JSON object")
    doc = {**doc, **{k: v for k, v in overrides.items() if v is not None}}
    try:
        spec = SweepSpec.from_json(doc)
    except SweepConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise UsageError(f"sweep: {exc}") from None
    reports = theorem_search(spec, symbolic_k_max=cfg.k_max, signs=cfg.signs, parallelism=cfg.parallelism)
    out = [r.to_json(timing=cfg.timing) for r in reports]
    out = sort_reports(out)
    dump_reports(out, cfg)
    for r in reports:
        for v in r.details.get("violators", []):
            print(f"VIOLATOR {json.dumps(v, sort_keys=True)}", file=sys.stderr)
    return _exit_for(out)


# -- jet ----------------------------------------------------------------------------------------

JET_DEFAULTS = {"k": 1, "trials": 100, "dims": [2, 3, 4], "degree": None, "seed": 0}


def signed_sum_report(results: list, params: dict) -> LemmaReport:
    report = LemmaReport("signed-sum", params)
    trials = []
    for n, res in enumerate(results):
        size = sum((abs(x) for x in res.residual.flat), Fraction(0))
        report.add(f"trial {n} (dim {res.dim}, seed {res.seed}): sum |R^k T - signed sum|", size)
        trials.append({"dim": res.dim, "seed": res.seed, "order": res.order,
                       "lhs_nonzero": int(sum(1 for x in res.lhs.flat if x != 0)),
                       "residual_nonzero": len(res.nonzero)})
        report.elapsed_ms += res.elapsed_ms
    report.details["trials"] = trials
    return report


def cmd_jet(cfg: RunConfig, config_path: str | None, overrides: dict) -> int:
    doc = _read_json(config_path) if config_path else {}
    if not isinstance(doc, dict):
        raise UsageError("$: jet config must be a JSON object")
    conf = {**JET_DEFAULTS, **doc, **{k: v for k, v in overrides.items() if v is not None}}
    try:
        k = int(conf["k"])
        trials = int(conf["trials"])
        seed = int(conf["seed"])
        dims = [int(d) for d in conf["dims"]]
    except (ValueError, TypeError) as exc:
        raise UsageError(f"jet config: {exc}") from None
    if k < 1:
        raise UsageError("$.k: must be >= 1")
    if "jet" in conf:
        try:
            jet = jet_from_json(conf["jet"])
        except ModelInvariantError:
            raise
        except (ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"$.jet: {exc}") from None
        results = [verify_signed_sum(jet, k)]
        params = {"k": k, "source": "explicit"}
    else:
        degree = int(conf["degree"]) if conf["degree"] is not None else 2 * k
        if not dims or any(d < 1 for d in dims):
            raise UsageError("$.dims: expected positive dimensions")
        if degree < 2 * k:
            raise UsageError("jet order too low for requested derivative count")
        results = []
        for dim, trial_seed in iter_trials(dims, trials, seed):
            jet = random_jet(dim, degree, 2, trial_seed, trace_free=bool(conf.get("trace_free", False)))
            results.append(verify_signed_sum(jet, k))
        params = {"k": k, "trials": trials, "dims": dims, "degree": degree, "seed": seed}
    report = signed_sum_report(results, params)
    out = [report.to_json(timing=cfg.timing)]
    dump_reports(out, cfg)
    return _exit_for(out)


# -- report-merge -----------------------------------------------------------------------------

def cmd_merge(cfg: RunConfig, paths: list) -> int:
    merged = []
    for path in paths:
        doc = _read_json(path)
        if not isinstance(doc, list) or not all(isinstance(r, dict) and {"lemma", "params", "verdict"} <= set(r) for r in doc):
            raise UsageError(f"{path}: expected a JSON array of reports")
        merged.extend(doc)
    merged = sort_reports(merged)
    dump_reports(merged, cfg)
    return _exit_for(merged)


# -- argument parsing ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="curvlab", description="Exact verification of curvature identities R^k . omega.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k-max", type=int, default=DEFAULT_K_MAX, help="largest k for symbolic checks (default 6)")
    common.add_argument("--sign", choices=sorted(SIGN_CHOICES), default="both", help="sign s of the block model")
    common.add_argument("--mode", choices=("exact", "float"), default="exact")
    common.add_argument("--tol", type=float, help="float tolerance (default 1e-9)")
    common.add_argument("--seed", type=int, help="seed for randomized checks (default 0)")
    common.add_argument("--parallelism", type=int, default=1, help="worker processes")
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--omit-timing", action="store_true", help="write null timings for byte-stable reports")

    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("verify", parents=[common], help="run a registered check or all of them")
    p.add_argument("lemma", help="check id or 'all'")
    p = sub.add_parser("eval", parents=[common], help="evaluate a quantity on a model file")
    p.add_argument("model")
    p.add_argument("quantity", help='e.g. "A:k=1" or "component:k=1,idx=1,2,3,4"')
    p.add_argument("--set", action="append", default=[], metavar="NAME=VALUE", help="bind a model variable")
    p = sub.add_parser("search", parents=[common], help="symbolic proof chain plus numeric sweep")
    p.add_argument("sweep", nargs="?", help="sweep JSON (default grid when omitted)")
    p.add_argument("--sweep-k-max", type=int, help="override the sweep's k_max")
    p = sub.add_parser("jet", parents=[common], help="signed-sum identity on random or given jets")
    p.add_argument("config", nargs="?", help="jet config JSON")
    p.add_argument("--k", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--dims", type=lambda s: [int(x) for x in s.split(",")])
    p.add_argument("--degree", type=int)
    p = sub.add_parser("report-merge", parents=[common], help="merge report files deterministically")
    p.add_argument("reports", nargs="+")
    return parser


def main(argv: list | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = RunConfig(args.command, k_max=args.k_max, signs=SIGN_CHOICES[args.sign], mode=args.mode,
                        tolerance=DEFAULT_TOLERANCE if args.tol is None else args.tol,
                        seed=0 if args.seed is None else args.seed, parallelism=args.parallelism, out=args.out,
                        timing=not args.omit_timing)
        if args.command == "verify":
            return cmd_verify(cfg, args.lemma)
        if args.command == "eval":
            return cmd_eval(cfg, args.model, args.quantity, args.set)
        if args.command == "search":
            return cmd_search(cfg, args.sweep, {"k_max": args.sweep_k_max, "tolerance": args.tol})
        if args.command == "jet":
            return cmd_jet(cfg, args.config, {"k": args.k, "trials": args.trials, "dims": args.dims,
                                              "degree": args.degree, "seed": args.seed})
        return cmd_merge(cfg, args.reports)
    except ModelInvariantError as exc:
        print(f"curvlab: invariant violation: {exc.invariant}", file=sys.stderr)
        if str(exc) != exc.invariant:
            print(f"curvlab: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (UsageError, SweepConfigError) as exc:
        print(f"curvlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CurvlabError as exc:
        print(f"curvlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry_point() -> None:  # pragma: no cover - thin console-script shim
    sys.exit(main())
