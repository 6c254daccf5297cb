"""Command-line front end.

Subcommands: ``sample``, ``tail-order``, ``verify`` and ``figure1``.
Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O error.

Model specs follow ``family[:subfamily][:params][:d=K]``, for example
``archimedean:gumbel(2):d=3``, ``elliptical:kotz(1,1,0.5):rho=0.5``,
``ev:logistic(2):d=2`` or ``archimedean:williamson:dagum(0.6,1.8,1):d=2``.
"""

import argparse
from dataclasses import dataclass, field
import json
import math
import os
from pathlib import Path
import re
import sys
import time

import numpy as np
from scipy.special import ndtri

from . import __version__
from . import copulas as cm
from . import generators as gm
from . import radial as rm
from .errors import TailOrderError, UnsupportedOperationError
from .rng import RngStream
from .sampling import figure1_samples, sample_copula
from .tailmetrics import estimate_lambda, estimate_model_tail_order, tail_order_catalog
from .verification import Fixtures, run_suite

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
SEED_ENV = "TAILORDER_SEED"
DEFAULT_SEED = 1


class UsageError(Exception):
    pass


class OutputError(Exception):
    pass


# ----------------------------------------------------------------------------
# Model-spec grammar
# ----------------------------------------------------------------------------

_TOKEN = re.compile(r"^([a-z][a-z0-9_-]*)(?:\(([^()]*)\))?$")


def _split_top(spec):
    parts, depth, cur = [], 0, []
    for ch in spec:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == ":" and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    if depth != 0:
        raise UsageError(f"unbalanced parentheses in model spec {spec!r}")
    return [p.strip() for p in parts if p.strip()]


def _number(text):
    try:
        return float(text)
    except ValueError as exc:
        raise UsageError(f"not a number: {text!r}") from exc


def _parse_tokens(spec):
    names, params = [], {}
    for part in _split_top(spec.strip().lower()):
        if "=" in part:
            key, _, value = part.partition("=")
            params[key.strip()] = _number(value.strip())
            continue
        m = _TOKEN.match(part)
        if not m:
            raise UsageError(f"cannot parse model-spec token {part!r}")
        args = tuple(_number(a) for a in m.group(2).split(",")) if m.group(2) else ()
        names.append((m.group(1), args))
    if not names:
        raise UsageError("model spec names no family")
    return names, params


def _arity(name, args, n):
    if len(args) != n:
        raise UsageError(f"{name} takes {n} parameter(s), got {len(args)}")
    return args


def _radial_law(name, args, d):
    table = {
        "dagum": lambda a: rm.Dagum(*(a if len(a) == 3 else _arity("dagum", a, 2))),
        "weibull": lambda a: rm.PositiveWeibull(*_arity("weibull", a, 1)),
        "positive-weibull": lambda a: rm.PositiveWeibull(*_arity("positive-weibull", a, 1)),
        "kproduct": lambda a: rm.KProduct(d, *_arity("kproduct", a, 1)),
        "gamma": lambda a: rm.Gamma(*_arity("gamma", a, 1)),
        "pointmass": lambda a: rm.PointMass(*_arity("pointmass", a, 1)),
        "inversegamma": lambda a: rm.InverseGamma(*_arity("inversegamma", a, 1)),
        "kotz": lambda a: rm.KotzRadial(*_arity("kotz", a, 3)),
    }
    if name not in table:
        raise UsageError(f"unknown radial law {name!r}; known: {', '.join(sorted(table))}")
    return table[name](args)


def _dim(params, default=2):
    d = params.get("d", default)
    if d != int(d) or d < 2:
        raise UsageError(f"d must be an integer >= 2, got {d!r}")
    return int(d)


def parse_model(spec):
    """Build a CopulaModel from a model-spec string."""
    names, params = _parse_tokens(spec)
    (family, fargs), rest = names[0], names[1:]
    unknown = set(params) - {"d", "rho"}
    if unknown:
        raise UsageError(f"unknown parameter(s): {', '.join(sorted(unknown))}")
    try:
        if family in ("independence", "comonotone") and not rest:
            d = _dim(params)
            return cm.Independence(d) if family == "independence" else cm.Comonotone(d)
        if family == "elliptical":
            if not rest:
                raise UsageError("elliptical needs a subfamily: gaussian, student(nu) or kotz(N,beta,xi)")
            family, fargs = rest[0]
            rest = rest[1:]
        if family in ("gaussian", "student", "kotz") and not rest:
            if "rho" not in params:
                raise UsageError(f"{family} needs rho=<value>")
            if _dim(params) != 2:
                raise UsageError("elliptical models are bivariate (d=2)")
            rho = params["rho"]
            if family == "gaussian":
                _arity("gaussian", fargs, 0)
                return cm.GaussianBiv(rho)
            if family == "student":
                return cm.StudentBiv(rho, *_arity("student", fargs, 1))
            return cm.KotzBiv(rho, *_arity("kotz", fargs, 3))
        if family == "archimedean" and rest:
            d = _dim(params)
            sub, sargs = rest[0]
            if sub == "williamson":
                if len(rest) != 2:
                    raise UsageError("archimedean:williamson needs a radial law, e.g. dagum(0.6,1.8,1)")
                law = _radial_law(*rest[1], d)
                return cm.Archimedean(d, gm.WilliamsonGen(law, d))
            if len(rest) != 1:
                raise UsageError(f"unexpected tokens after {sub!r}")
            gens = {
                "gumbel": lambda a: gm.GumbelGen(*_arity("gumbel", a, 1)),
                "acig": lambda a: gm.ACIG(*_arity("acig", a, 1)),
                "joe": lambda a: gm.Joe2000(*_arity("joe", a, 1)),
                "joe2000": lambda a: gm.Joe2000(*_arity("joe2000", a, 1)),
            }
            if sub not in gens:
                raise UsageError(f"unknown generator {sub!r}; known: {', '.join(sorted(gens))}, williamson")
            return cm.Archimedean(d, gens[sub](sargs))
        if family == "ev" and len(rest) == 1:
            d = _dim(params)
            sub, sargs = rest[0]
            if sub == "logistic":
                return cm.ExtremeValue(cm.Logistic(*_arity("logistic", sargs, 1), d))
            if sub in ("sum", "independence"):
                return cm.ExtremeValue(cm.SumA(d))
            if sub in ("max", "comonotone"):
                return cm.ExtremeValue(cm.MaxA(d))
            raise UsageError(f"unknown Pickands family {sub!r}; known: logistic, sum, max")
    except (TailOrderError, TypeError) as exc:
        raise UsageError(f"invalid model {spec!r}: {exc}") from exc
    raise UsageError(f"unrecognized model spec {spec!r}")


# ----------------------------------------------------------------------------
# Output
# ----------------------------------------------------------------------------


def format_number(x):
    """17 significant digits, period decimal, independent of locale."""
    return format(float(x), ".17g")


def to_json(obj, indent=2, _level=0):
    """JSON text with every float written to 17 significant digits; non-finite floats become null."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        return "[\n" + ",\n".join(pad + to_json(v, indent, _level + 1) for v in seq) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_number(obj) if math.isfinite(obj) else "null"
    return json.dumps(str(obj))


def write_csv(path, values):
    values = np.asarray(values, dtype=float)
    header = ",".join(f"x{j + 1}" for j in range(values.shape[1]))
    lines = [header] + [",".join(format_number(v) for v in row) for row in values]
    text = "\n".join(lines) + "\n"
    _write_text(path, text)


def _write_text(path, text):
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    try:
        p = Path(path)
        if p.parent and not p.parent.exists():
            p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


@dataclass
class RunManifest:
    command: str
    params: dict
    seed: int
    outputs: list = field(default_factory=list)
    argv: list = field(default_factory=list)
    version: str = __version__
    duration_s: float = 0.0

    def as_dict(self):
        return {
            "command": self.command,
            "params": self.params,
            "seed": self.seed,
            "version": self.version,
            "outputs": self.outputs,
            "argv": self.argv,
            "duration_s": self.duration_s,
        }

    def write(self, path):
        _write_text(path, to_json(self.as_dict()) + "\n")


def _manifest_path(out):
    return Path(str(out) + ".manifest.json")


# ----------------------------------------------------------------------------
# Commands
# ----------------------------------------------------------------------------


def resolve_seed(value):
    if value is not None:
        return value
    env = os.environ.get(SEED_ENV)
    if env is None or env.strip() == "":
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError as exc:
        raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from exc


def cmd_sample(args, argv):
    t0 = time.perf_counter()
    model = parse_model(args.model)
    seed = resolve_seed(args.seed)
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    try:
        u = sample_copula(model, RngStream(seed, 0), args.n).values
    except UnsupportedOperationError as exc:
        raise UsageError(str(exc)) from exc
    values = u if args.margins == "uniform" else ndtri(np.clip(u, np.finfo(float).tiny, 1.0 - np.finfo(float).epsneg))
    write_csv(args.out, values)
    if args.out not in (None, "-"):
        RunManifest(
            "sample",
            {"model": args.model, "n": args.n, "margins": args.margins},
            seed,
            [str(args.out)],
            argv,
            duration_s=time.perf_counter() - t0,
        ).write(_manifest_path(args.out))
    return EXIT_OK


def _grid_arg(args, method):
    if args.grid_min is None and args.grid_max is None and args.grid_points is None:
        return None
    from .tailmetrics import ANALYTIC_GRID, MC_GRID

    lo, hi, k = MC_GRID if method == "monte-carlo" else ANALYTIC_GRID
    return (
        args.grid_min if args.grid_min is not None else lo,
        args.grid_max if args.grid_max is not None else hi,
        args.grid_points if args.grid_points is not None else k,
    )


def cmd_tail_order(args, argv):
    t0 = time.perf_counter()
    model = parse_model(args.model)
    seed = resolve_seed(args.seed)
    method = "analytic-diagonal" if args.method == "analytic" else "monte-carlo"
    grid = _grid_arg(args, method)
    rng = RngStream(seed, 0)
    try:
        est = estimate_model_tail_order(model, args.side, method=method, grid=grid, n=args.n, rng=rng)
    except UnsupportedOperationError as exc:
        raise UsageError(f"{exc}. Use --method mc for a Monte Carlo estimate.") from exc
    except TailOrderError as exc:
        raise UsageError(str(exc)) from exc
    report = est.as_dict()
    report.update(model=args.model, seed=seed)
    if method == "monte-carlo":
        report["n"] = args.n
    if args.assume_kappa_one:
        from .sampling import empirical_copula_diagonal, sample_copula as _sc

        if method == "analytic-diagonal":
            fn = cm.diagonal if args.side == "lower" else cm.survival_diagonal
            report["lambda"] = estimate_lambda(lambda u: fn(model, u), grid or est.grid)
        else:
            sample = _sc(model, RngStream(seed, 0), args.n)
            report["lambda"] = estimate_lambda(lambda u: empirical_copula_diagonal(sample, u, args.side), grid or est.grid)
    entry = tail_order_catalog(model)
    cat = entry.kappa_lower if args.side == "lower" else entry.kappa_upper
    report["catalog"] = None if cat is None else {
        "kappa": cat,
        "lambda": entry.lambda_lower if args.side == "lower" else entry.lambda_upper,
        "note": entry.note,
    }
    text = to_json(report) + "\n"
    _write_text(args.out, text)
    if args.out not in (None, "-"):
        params = {k: v for k, v in vars(args).items() if k not in ("func", "out", "seed")}
        RunManifest("tail-order", params, seed, [str(args.out)], argv, duration_s=time.perf_counter() - t0).write(
            _manifest_path(args.out)
        )
    return EXIT_OK


def _parse_fixtures(items):
    out = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--fixture expects KEY=VALUE, got {item!r}")
        try:
            out[key.strip()] = json.loads(value)
        except json.JSONDecodeError as exc:
            raise UsageError(f"fixture value for {key!r} is not JSON: {value!r}") from exc
    try:
        return Fixtures.with_overrides(out) if out else None
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from exc


def cmd_verify(args, argv):
    t0 = time.perf_counter()
    seed = resolve_seed(args.seed)
    fixtures = _parse_fixtures(args.fixture)
    only = None
    if args.only:
        try:
            only = [int(x) for x in args.only.split(",")]
        except ValueError as exc:
            raise UsageError("--only expects comma-separated criterion numbers") from exc
        if any(not 1 <= i <= 12 for i in only):
            raise UsageError("criterion numbers run from 1 to 12")
    results = run_suite(args.suite, seed, fixtures, only)
    report = {
        "suite": args.suite,
        "seed": seed,
        "passed": all(r.passed for r in results),
        "criteria": [r.as_dict() for r in results],
        "failed": [f"{r.cid}: {r.name}" for r in results if not r.passed],
    }
    _write_text(args.out, to_json(report) + "\n")
    if args.out not in (None, "-"):
        RunManifest(
            "verify",
            {"suite": args.suite, "fixture": args.fixture or [], "only": args.only},
            seed,
            [str(args.out)],
            argv,
            duration_s=time.perf_counter() - t0,
        ).write(_manifest_path(args.out))
    for r in results:
        if not r.passed:
            print(f"FAILED criterion {r.cid}: {r.name}", file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def cmd_figure1(args, argv):
    t0 = time.perf_counter()
    seed = resolve_seed(args.seed)
    out = Path(args.out_dir)
    u, z = figure1_samples(seed)
    unif, norm = out / "dagum-simplex-unif.csv", out / "dagum-simplex-norm.csv"
    write_csv(unif, u)
    write_csv(norm, z)
    RunManifest(
        "figure1",
        {"law": "dagum(0.6,1.8,1)", "d": 2, "n": int(u.shape[0])},
        seed,
        [str(unif), str(norm)],
        argv,
        duration_s=time.perf_counter() - t0,
    ).write(out / "figure1.manifest.json")
    return EXIT_OK


# ----------------------------------------------------------------------------
# Entry point
# ----------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="tailorder", description="Copula tail orders: sampling, estimation and checks.")
    p.add_argument("--version", action="version", version=f"tailorder {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    seed_help = f"random seed (default: ${SEED_ENV} or {DEFAULT_SEED})"

    s = sub.add_parser("sample", help="draw from a copula model and write CSV")
    s.add_argument("--model", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--margins", choices=("uniform", "normal"), default="uniform")
    s.add_argument("--seed", type=int, default=None, help=seed_help)
    s.add_argument("--out", default=None, help="CSV path (stdout when omitted)")
    s.set_defaults(func=cmd_sample)

    t = sub.add_parser("tail-order", help="estimate a tail order by diagonal regression")
    t.add_argument("--model", required=True)
    t.add_argument("--side", choices=("lower", "upper"), default="lower")
    t.add_argument("--method", choices=("analytic", "mc"), default="analytic")
    t.add_argument("--n", type=int, default=10**5, help="Monte Carlo sample size")
    t.add_argument("--grid-min", type=float, default=None)
    t.add_argument("--grid-max", type=float, default=None)
    t.add_argument("--grid-points", type=int, default=None)
    t.add_argument("--assume-kappa-one", action="store_true", help="also report lambda (meaningful when kappa = 1)")
    t.add_argument("--seed", type=int, default=None, help=seed_help)
    t.add_argument("--out", default=None, help="JSON path (stdout when omitted)")
    t.set_defaults(func=cmd_tail_order)

    v = sub.add_parser("verify", help="run the acceptance checks")
    v.add_argument("--suite", choices=("quick", "full"), default="quick")
    v.add_argument("--seed", type=int, default=None, help=seed_help)
    v.add_argument("--fixture", action="append", metavar="KEY=JSON", help="override a model parameter (negative control)")
    v.add_argument("--only", default=None, help="comma-separated criterion numbers")
    v.add_argument("--out", default=None, help="JSON path (stdout when omitted)")
    v.set_defaults(func=cmd_verify)

    f = sub.add_parser("figure1", help="write the Dagum-simplex scatter data")
    f.add_argument("--out-dir", default=".")
    f.add_argument("--seed", type=int, default=None, help=seed_help)
    f.set_defaults(func=cmd_figure1)
    return p


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args, argv)
    except UsageError as exc:
        print(f"tailorder: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OutputError as exc:
        print(f"tailorder: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"tailorder: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
