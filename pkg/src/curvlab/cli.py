"""Command-line entry point.

Space specs have the form ``<family>:<metric>[?key=val&...]``:

  su2:biinvariant, su3:biinvariant, so5:biinvariant
  su2:qt?k=e1&t=1.5        Q_t = t Q|k + Q|k-perp, k spanned by basis vectors (e1,e2,...)
  su3:qt?k=u2&t=0.5        k may also name a subalgebra: torus, u2, su2
  berger7                  SO(5)/SO(3) irreducible, normal homogeneous metric
  flag:su3/t2?t=0.5        W^6 with g_t (default t = 0.5)
  flag:su3/t2?x=1,0.5,1    W^6 with a diagonal metric on the three root spaces
  aw:p,q?t=0.5             Aloff-Wallach W_{p,q} with g_t (default t = 0.5)
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Callable, Optional
from urllib.parse import parse_qsl

import numpy as np

from . import census as cen
from .biquot import (BazaikinParams, BiquotientError, EschenburgParams, baz_is_free, baz_is_positive,
                     baz_order_h6, esch_horizontal_flat_sampler)
from .homspace import (aloff_wallach, berger_b7, flag_w6, gt_metric, tangent_curvature_fn,
                       w6_diagonal_metric)
from .liealg import LieAlgebraError, build_algebra, make_subalgebra, named_subalgebra
from .metric import FLAT_TOL, LeftInvariantMetric, gram_determinant, subalgebra_scaled, unnormalized_curvature
from .optimize import Budget, DEFAULT_BUDGET, min_sectional, optimize_family

SCHEMA = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3


class UsageError(ValueError):
    pass


class NumericalError(RuntimeError):
    pass


@dataclass
class RunConfig:
    seed: int = 0
    samples: int = DEFAULT_BUDGET.samples
    restarts: int = DEFAULT_BUDGET.restarts
    iterations: int = DEFAULT_BUDGET.iterations
    tolerance: float = FLAT_TOL
    format: str = "text"
    threads: int = 1

    @property
    def budget(self) -> Budget:
        return Budget(self.samples, self.restarts, self.iterations)


@dataclass
class Space:
    spec: str
    dim: int
    curvature: Callable
    family: Optional[Callable] = None  # params -> curvature fn, for --optimize-family


# ---------------------------------------------------------------- space specs


def _group_curvature(metric: LeftInvariantMetric):
    def fn(a, b):
        return unnormalized_curvature(metric, a, b) / gram_determinant(metric, a, b)
    return fn


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _param(opts: dict, key: str, default=None) -> float:
    if key not in opts:
        if default is None:
            raise UsageError(f"missing parameter {key!r}")
        return default
    vals = _floats(opts[key])
    if len(vals) != 1:
        raise UsageError(f"parameter {key!r} takes one value")
    return vals[0]


def _subalgebra_from_key(alg, key: str):
    names = {"torus": "torus", "u2": "u2_block", "su2": "su2_block"}
    if key in names:
        return named_subalgebra(alg, names[key])
    vecs = []
    for tok in key.split(","):
        if not (tok.startswith("e") and tok[1:].isdigit()):
            raise UsageError(f"bad subalgebra {key!r}: use e1,e2,... or one of {sorted(names)}")
        i = int(tok[1:])
        if not 1 <= i <= alg.dim:
            raise UsageError(f"basis index {tok} out of range 1..{alg.dim}")
        vecs.append(np.eye(alg.dim)[i - 1])
    return make_subalgebra(alg, vecs, name=key)


def parse_space(text: str) -> Space:
    head, _, query = text.partition("?")
    try:
        opts = dict(parse_qsl(query, keep_blank_values=True, strict_parsing=bool(query)))
    except ValueError:
        raise UsageError(f"malformed options {query!r}") from None
    try:
        if head == "berger7":
            spec = berger_b7()
            return Space(text, spec.tangent_dim, tangent_curvature_fn(LeftInvariantMetric.biinvariant(spec.G), spec))
        if head == "flag:su3/t2":
            spec = flag_w6()
            family = lambda x: tangent_curvature_fn(w6_diagonal_metric(spec, x), spec)  # noqa: E731
            if "x" in opts:
                x = _floats(opts["x"])
                if len(x) != 3:
                    raise UsageError("x takes three scales")
                fn = family(x)
            else:
                fn = tangent_curvature_fn(gt_metric(spec, _param(opts, "t", 0.5)), spec)
            return Space(text, spec.tangent_dim, fn, family)
        if head.startswith("aw:"):
            try:
                p, q = (int(v) for v in head[3:].split(","))
            except ValueError:
                raise UsageError(f"aw expects two integers, got {head[3:]!r}") from None
            spec = aloff_wallach(p, q)
            return Space(text, spec.tangent_dim, tangent_curvature_fn(gt_metric(spec, _param(opts, "t", 0.5)), spec))
        family, _, kind = head.partition(":")
        groups = {"su2": ("su", 2), "su3": ("su", 3), "so5": ("so", 5)}
        if family not in groups:
            raise UsageError(f"unknown family {family!r}")
        alg = build_algebra(*groups[family])
        if kind == "biinvariant":
            metric = LeftInvariantMetric.biinvariant(alg)
        elif kind == "qt":
            sub = _subalgebra_from_key(alg, opts.get("k", "e1"))
            metric = subalgebra_scaled(sub, _param(opts, "t"))
        else:
            raise UsageError(f"unknown metric {kind!r} for {family}")
        return Space(text, alg.dim, _group_curvature(metric))
    except (LieAlgebraError, BiquotientError) as exc:
        raise UsageError(str(exc)) from None
    except ValueError as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(str(exc)) from None


# ---------------------------------------------------------------- output


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(type(o))


def emit(cfg: RunConfig, payload: dict, lines: list[str]) -> None:
    if cfg.format == "json":
        out = {"schema": SCHEMA, **payload}
        print(json.dumps(out, sort_keys=True, default=_json_default))
    elif lines:
        print("\n".join(lines))


def _provenance(cfg: RunConfig, space: Optional[str] = None) -> dict:
    d = {"seed": cfg.seed, "budget": {"samples": cfg.samples, "restarts": cfg.restarts,
                                       "iterations": cfg.iterations},
         "tolerance": cfg.tolerance}
    if space is not None:
        d["space"] = space
    return d


# ---------------------------------------------------------------- commands


def cmd_minsec(args, cfg: RunConfig) -> int:
    space = parse_space(args.space)
    ext = min_sectional(space.curvature, space.dim, cfg.budget, cfg.seed, cfg.threads)
    emit(cfg, {"command": "minsec", **_provenance(cfg, space.spec), "result": ext.as_dict()},
         [f"space    {space.spec}", f"min      {ext.min_value:.12g}", f"max      {ext.max_value:.12g}",
          f"samples  {ext.samples}  restarts {ext.restarts}  seed {ext.seed}"])
    return 0


def cmd_pinch(args, cfg: RunConfig) -> int:
    space = parse_space(args.space)
    params = None
    if args.optimize_family:
        if args.optimize_family == "gt":
            if not args.space.startswith("flag:su3/t2"):
                raise UsageError("--optimize-family gt needs the flag space")
            spec = flag_w6()
            family = lambda p: tangent_curvature_fn(gt_metric(spec, p[0]), spec)  # noqa: E731
            grid = [np.linspace(0.1, 1.3, 13)]
        else:
            if space.family is None:
                raise UsageError(f"--optimize-family diagonal is not available for {space.spec}")
            family = space.family
            g = np.array([0.25, 0.5, 0.75, 1.0])
            grid = [g, g, g]
        inner = Budget(min(cfg.samples, 20_000), min(cfg.restarts, 8), min(cfg.iterations, 200))
        objective = lambda fn: min_sectional(fn, space.dim, inner, cfg.seed, cfg.threads).pinching  # noqa: E731
        params, _ = optimize_family(family, objective, grid)
        space.curvature = family(params)
    ext = min_sectional(space.curvature, space.dim, cfg.budget, cfg.seed, cfg.threads)
    if not ext.max_value > 0:
        raise NumericalError(f"pinching undefined: maximal curvature {ext.max_value:.3e} is not positive")
    payload = {"command": "pinch", **_provenance(cfg, space.spec), "pinching": ext.pinching,
               "result": ext.as_dict()}
    lines = [f"space     {space.spec}", f"pinching  {ext.pinching:.12g}",
             f"min       {ext.min_value:.12g}", f"max       {ext.max_value:.12g}"]
    if params is not None:
        payload["family"] = args.optimize_family
        payload["params"] = list(params)
        lines.append(f"params    {', '.join(f'{p:.6g}' for p in params)}")
    emit(cfg, payload, lines)
    return 0


def _int_tuple(text: str, n: int, label: str) -> tuple:
    try:
        vals = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"--{label} expects {n} comma-separated integers") from None
    if len(vals) != n:
        raise UsageError(f"--{label} expects {n} integers, got {len(vals)}")
    return vals


def _esch_params(args) -> EschenburgParams:
    k, l = _int_tuple(args.k, 3, "k"), _int_tuple(args.l, 3, "l")
    try:
        return EschenburgParams(k, l)
    except BiquotientError as exc:
        raise UsageError(str(exc)) from None


def _bool(b: bool) -> str:
    return "true" if b else "false"


def _record_lines(rec: cen.CensusRecord) -> list[str]:
    r = "none" if rec.r is None else f"{rec.r} |r|={rec.abs_r}"
    line = f"free={_bool(rec.free)} positive={_bool(rec.positive)} r={r}"
    if rec.warnings:
        line += " warnings=" + ";".join(rec.warnings)
    return [line]


def _write_census(records, args, cfg: RunConfig, kind: str) -> int:
    fmt = args.out_format or ("jsonl" if args.out.endswith(".jsonl") else "csv")
    n = cen.write_census(records, args.out, fmt)
    emit(cfg, {"command": f"{kind} census", "bound": args.bound, "out": args.out, "format": fmt, "records": n},
         [f"wrote {n} records to {args.out}"])
    return 0


def cmd_esch(args, cfg: RunConfig) -> int:
    if args.action == "census":
        if args.bound < 1:
            raise UsageError("--bound must be at least 1")
        filters = [f for f in (args.filter or "").split(",") if f]
        if set(filters) - {"free", "positive"}:
            raise UsageError(f"unknown filter in {args.filter!r}")
        return _write_census(cen.esch_census(args.bound, not args.no_normalize, filters), args, cfg, "esch")
    params = _esch_params(args)
    if args.action == "check":
        rec = cen.esch_record(params.k, params.l)
        emit(cfg, {"command": "esch check", **rec.as_json(), "abs_r": rec.abs_r}, _record_lines(rec))
        return 0
    rep = esch_horizontal_flat_sampler(params, t=args.t, samples=cfg.samples, seed=cfg.seed)
    emit(cfg, {"command": "esch sample", **_provenance(cfg), "report": rep.as_dict()},
         [f"margin {rep.margin:.6g} (block {rep.best_block}, {rep.orientation} orientation)",
          f"integer criterion {_bool(rep.integer_positive)}"])
    return 0


def cmd_baz(args, cfg: RunConfig) -> int:
    if args.action == "census":
        if args.bound < 1:
            raise UsageError("--bound must be at least 1")
        return _write_census(cen.baz_census(args.bound), args, cfg, "baz")
    q = _int_tuple(args.q, 5, "q")
    p = BazaikinParams(q)
    free = baz_is_free(p)
    rec = cen.CensusRecord("bazaikin", p.q, free, free and baz_is_positive(p),
                           baz_order_h6(p) if free else None)
    emit(cfg, {"command": "baz check", **rec.as_json(), "abs_r": rec.abs_r}, _record_lines(rec))
    return 0


def cmd_coincide(args, cfg: RunConfig) -> int:
    try:
        records = cen.read_census(args.file)
    except cen.CensusParseError as exc:
        raise UsageError(str(exc)) from None
    except OSError as exc:
        raise UsageError(f"cannot read {args.file}: {exc.strerror}") from None
    try:
        groups = cen.find_coincidences(records)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    lines = []
    for g in groups:
        lines.append(f"|r|={g.abs_r} ({g.kind}, {len(g.members)} members)")
        for m in g.members:
            params = f"k={m.k} l={m.l}" if g.kind == "eschenburg" else f"q={m.q}"
            lines.append(f"  {params} r={m.r}")
    emit(cfg, {"command": "coincide", "file": args.file,
               "groups": [{"abs_r": g.abs_r, "kind": g.kind, "members": [m.as_json() for m in g.members]}
                          for g in groups]}, lines)
    return 0


# ---------------------------------------------------------------- argparse


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=DEFAULT_BUDGET.samples)
    p.add_argument("--restarts", type=int, default=DEFAULT_BUDGET.restarts)
    p.add_argument("--iterations", type=int, default=DEFAULT_BUDGET.iterations)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--threads", type=int, default=None, help="worker cap (default: $CURVLAB_THREADS or 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="curvlab", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name in ("minsec", "pinch"):
        p = sub.add_parser(name, description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("--space", required=True)
        _common(p)
        if name == "pinch":
            p.add_argument("--optimize-family", choices=("diagonal", "gt"))

    esch = sub.add_parser("esch").add_subparsers(dest="action", required=True, parser_class=_Parser)
    for action in ("check", "sample"):
        p = esch.add_parser(action)
        p.add_argument("--k", required=True)
        p.add_argument("--l", required=True)
        _common(p)
        if action == "sample":
            p.add_argument("--t", type=float, default=0.7)
            p.set_defaults(samples=10_000)
    p = esch.add_parser("census")
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--out-format", choices=("csv", "jsonl"))
    p.add_argument("--filter", help="comma-separated subset of free,positive")
    p.add_argument("--no-normalize", action="store_true")
    _common(p)

    baz = sub.add_parser("baz").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = baz.add_parser("check")
    p.add_argument("--q", required=True)
    _common(p)
    p = baz.add_parser("census")
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--out-format", choices=("csv", "jsonl"))
    _common(p)

    p = sub.add_parser("coincide")
    p.add_argument("file")
    _common(p)
    return parser


def _threads(arg: Optional[int]) -> int:
    if arg is not None:
        n = arg
    else:
        env = os.environ.get("CURVLAB_THREADS", "")
        try:
            n = int(env) if env else 1
        except ValueError:
            raise UsageError(f"CURVLAB_THREADS must be an integer, got {env!r}") from None
    if n < 1:
        raise UsageError("thread count must be positive")
    return n


COMMANDS = {"minsec": cmd_minsec, "pinch": cmd_pinch, "esch": cmd_esch, "baz": cmd_baz, "coincide": cmd_coincide}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(seed=args.seed, samples=args.samples, restarts=args.restarts, iterations=args.iterations,
                        format=args.format, threads=_threads(args.threads))
        cfg.budget  # validates
        return COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"curvlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"curvlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"curvlab: error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

