"""Command-line front end.

Commands: field, count, verify-bounds, threshold, table, canonicalize.
Reports go to stdout as JSON lines (default) or TSV; diagnostics go to stderr.

Exit codes: 0 success, 1 invalid input or I/O failure, 2 numerical drift or a
violated bound (an implementation fault), 3 an avoidance set without a
primitive element.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import List, Optional

from . import __version__
from .counting import (
    ANALYTIC,
    EXACT_SCAN,
    brute_force_count,
    primitive_witnesses,
    rhs_limit,
    theorem31_report,
    threshold_search,
    verify_theorem22,
    vinogradov_count_logs,
    avoidance_logs,
)
from .errors import NumericalDrift, PrimavoidError
from .ff_core import ENUMERATION_CAP, FieldCtx, field_from_spec
from .hyperplanes import (
    AVOIDANCE_CAP,
    HyperplaneConfig,
    canonicalize,
    config_from_dict,
    random_config,
    random_hyperplanes,
)
from .multiplicative import build_dlog_table, factorize, find_generator, robin_bound_holds

EXIT_OK, EXIT_INPUT, EXIT_FAULT, EXIT_NO_PRIMITIVE = 0, 1, 2, 3


@dataclass
class RunSpec:
    command: str
    field: Optional[dict]
    config_source: str
    output_format: str
    cap: int
    seed: int


def _load_json(text: str):
    """Inline JSON or a path to a JSON file."""
    text = text.strip()
    if text.startswith("{") or text.startswith("["):
        return json.loads(text)
    return json.loads(Path(text).read_text())


class _Emitter:
    def __init__(self, fmt: str, out=None):
        self.fmt = fmt
        self.out = out if out is not None else sys.stdout
        self._header = None

    def record(self, obj: dict, row: Optional[dict] = None) -> None:
        if self.fmt == "json":
            self.out.write(json.dumps(obj, sort_keys=True) + "\n")
            return
        row = row if row is not None else obj
        if self._header is None:
            self._header = list(row)
            self.out.write("\t".join(self._header) + "\n")
        self.out.write("\t".join(_cell(row.get(k)) for k in self._header) + "\n")


def _cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True)
    return str(v)


def _envelope(spec: RunSpec, ctx: Optional[FieldCtx] = None, cfg: Optional[HyperplaneConfig] = None) -> dict:
    env = {"tool": "primavoid", "version": __version__, "command": spec.command, "seed": spec.seed}
    if ctx is not None:
        env["field"] = ctx.to_spec()
    if cfg is not None:
        env["config"] = cfg.to_dict()
        env["config_hash"] = cfg.config_hash()
    return env


def _configs(args, spec: RunSpec) -> List[HyperplaneConfig]:
    ctx = field_from_spec(spec.field) if spec.field is not None else None
    if args.config:
        data = _load_json(args.config)
        items = data if isinstance(data, list) else [data]
        out = []
        for item in items:
            if "field" not in item:
                if ctx is None:
                    raise ValueError("config without a field and no --field given")
                out.append(config_from_dict(item, ctx))
            else:
                out.append(config_from_dict(item))
        return out
    if ctx is None:
        raise ValueError("--field is required with --random")
    rng = random.Random(spec.seed)
    return [random_config(ctx, rng) for _ in range(args.random)]


def _run_spec(args) -> RunSpec:
    field = _load_json(args.field) if getattr(args, "field", None) else None
    cap = getattr(args, "cap", ENUMERATION_CAP)
    if cap > ENUMERATION_CAP:
        raise ValueError(f"--cap may not exceed {ENUMERATION_CAP}")
    source = "inline" if getattr(args, "config", None) else f"random:{getattr(args, 'random', 0)}"
    return RunSpec(args.command, field, source, args.format, cap, getattr(args, "seed", 0))


# -- commands ----------------------------------------------------------------

def cmd_field(args) -> int:
    spec = _run_spec(args)
    ctx = field_from_spec(spec.field)
    f = factorize(ctx.order - 1)
    out = _envelope(spec, ctx)
    out.update({"q": ctx.q, "order": ctx.order, "factorization": f.to_dict()})
    if ctx.order <= spec.cap:
        out["generator"] = find_generator(ctx, f).to_json()
    _Emitter(spec.output_format).record(out, {"p": ctx.p, "s": ctx.s, "r": ctx.r, "q": ctx.q, "order": ctx.order,
                                              "top_modulus": out["field"]["top_modulus"],
                                              "generator": out.get("generator")})
    return EXIT_OK


def cmd_count(args) -> int:
    spec = _run_spec(args)
    cfgs = _configs(args, spec)
    emit = _Emitter(spec.output_format)
    status = EXIT_OK
    tables = {}
    for cfg in cfgs:
        ctx = cfg.ctx
        if ctx.q == 2:
            print("warning: for q = 2 the avoidance set consists only of a single element; "
                  "checking it directly", file=sys.stderr)
        f = factorize(ctx.order - 1)
        if ctx.field_key not in tables:
            tables[ctx.field_key] = build_dlog_table(ctx, f=f, cap=spec.cap)
        t = tables[ctx.field_key]
        cap = min(spec.cap, AVOIDANCE_CAP)
        try:
            vino = vinogradov_count_logs(avoidance_logs(cfg, t, cap), t, f)
        except NumericalDrift as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_FAULT
        brute = brute_force_count(cfg, f, cap)
        witness = next(iter(primitive_witnesses(cfg, f, cap)), None)
        thm31 = theorem31_report(ctx.q, ctx.r, brute, f, cfg.config_hash())
        rec = _envelope(spec, ctx, cfg)
        rec.update({"vinogradov_count": vino, "brute_force_count": brute, "agree": vino == brute,
                    "witness": witness.to_json() if witness is not None else None,
                    "zero_in_coordinate_set": cfg.zero_in_coordinate_set,
                    "theorem31": thm31.to_dict()})
        if ctx.q == 2:
            rec["single_element"] = True
        emit.record(rec, {"config_hash": cfg.config_hash(), "q": ctx.q, "r": ctx.r,
                          "c": cfg.to_dict()["c"], "vinogradov": vino, "brute_force": brute,
                          "agree": vino == brute, "witness": rec["witness"],
                          "thm31_bound": thm31.bound_value, "scaled_count": thm31.exact_value})
        if vino != brute:
            status = EXIT_FAULT
        elif brute == 0 and status == EXIT_OK:
            status = EXIT_NO_PRIMITIVE
    return status


def cmd_verify_bounds(args) -> int:
    spec = _run_spec(args)
    cfgs = _configs(args, spec)
    emit = _Emitter(spec.output_format)
    ok = True
    tables = {}
    for cfg in cfgs:
        ctx = cfg.ctx
        f = factorize(ctx.order - 1)
        if ctx.field_key not in tables:
            tables[ctx.field_key] = build_dlog_table(ctx, f=f, cap=spec.cap)
        t = tables[ctx.field_key]
        reports = verify_theorem22(cfg, t, scale=args.tamper)
        worst = max(reports, key=lambda rep: rep.exact_value - rep.bound_value) if reports else None
        violations = [rep.metadata["j"] for rep in reports if not rep.holds]
        robin = robin_bound_holds(ctx.order - 1, f) if ctx.order - 1 >= 3 else None
        count = brute_force_count(cfg, f, min(spec.cap, AVOIDANCE_CAP))
        thm31 = theorem31_report(ctx.q, ctx.r, count, f, cfg.config_hash())
        holds = not violations and (robin is None or robin.holds) and thm31.holds
        ok &= holds
        rec = _envelope(spec, ctx, cfg)
        rec.update({"theorem22": {"characters": len(reports), "violations": violations,
                                  "worst": worst.to_dict() if worst else None},
                    "robin": robin.to_dict() if robin else None,
                    "theorem31": thm31.to_dict(), "all_hold": holds})
        emit.record(rec, {"config_hash": cfg.config_hash(), "q": ctx.q, "r": ctx.r, "c": cfg.to_dict()["c"],
                          "max_char_sum": worst.exact_value if worst else None,
                          "thm22_bound": worst.bound_value if worst else None,
                          "violations": len(violations),
                          "W": robin.exact_value if robin else None,
                          "robin_bound": robin.bound_value if robin else None,
                          "thm31_bound": thm31.bound_value, "scaled_count": thm31.exact_value,
                          "all_hold": holds})
    return EXIT_OK if ok else EXIT_FAULT


def cmd_threshold(args) -> int:
    spec = _run_spec(args)
    emit = _Emitter(spec.output_format)
    res = threshold_search(args.q, mode=args.mode)
    rec = _envelope(spec)
    rec.update(res.to_dict())
    if args.q == 3:
        rec["inequality1"] = ("does not yield any result for q = 3: right-hand side limit "
                              f"{rhs_limit(3):.6f} < 1")
    if spec.output_format == "json":
        emit.record(rec)
        return EXIT_OK
    emit.record({}, {"q": res.q, "condition": res.condition, "mode": res.mode,
                     "r_min": res.r_min, "note": res.note})
    print(file=emit.out)
    rows = _Emitter("tsv", emit.out)
    for entry in res.lhs_rhs_trace:
        if "metadata" in entry:
            rows.record({}, {"r": entry["metadata"]["r"], "lhs": entry["exact_value"], "rhs": entry["bound_value"],
                             "log_margin": entry["metadata"]["log_margin"], "holds": entry["holds"]})
    return EXIT_OK


def cmd_table(args) -> int:
    spec = _run_spec(args)
    emit = _Emitter(spec.output_format)
    exprs = {3: "sqrt(2)/3^(3/8)", 4: "sqrt(3)/2^(3/4)", 5: "2/5^(3/8)"}
    for q in (3, 4, 5):
        value = rhs_limit(q)
        rec = _envelope(spec)
        rec.update({"q": q, "limit": exprs[q], "value": float(f"{value:.6g}"), "value_exact": value})
        emit.record(rec, {"q": q, "limit": exprs[q], "value": f"{value:.6g}"})
    return EXIT_OK


def cmd_canonicalize(args) -> int:
    spec = _run_spec(args)
    emit = _Emitter(spec.output_format)
    if args.config:
        cfgs = _configs(args, spec)
        inputs = [None] * len(cfgs)
    else:
        ctx = field_from_spec(spec.field)
        rng = random.Random(spec.seed)
        inputs = [random_hyperplanes(ctx, rng) for _ in range(args.random)]
        cfgs = [canonicalize(hs, ctx) for hs in inputs]
    for cfg, hs in zip(cfgs, inputs):
        ctx = cfg.ctx
        rec = _envelope(spec, ctx, cfg)
        rec["point"] = cfg.point.to_json()
        rec["hyperplanes"] = [h.to_dict(ctx) for h in cfg.hyperplanes()]
        if hs is not None:
            rec["input_hyperplanes"] = [h.to_dict(ctx) for h in hs]
        emit.record(rec, {"config_hash": cfg.config_hash(), "basis": rec["config"]["basis"],
                          "c": rec["config"]["c"], "point": rec["point"]})
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="primavoid",
                                     description="Primitive elements avoiding affine hyperplanes in F_{q^r}.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, configs=True):
        p.add_argument("--format", choices=("json", "tsv"), default="json")
        p.add_argument("--seed", type=int, default=0, help="PRNG seed (recorded in every report)")
        if configs:
            p.add_argument("--field", help="field spec as JSON or a path to a JSON file")
            src = p.add_mutually_exclusive_group(required=True)
            src.add_argument("--config", help="config JSON (object or list) or a path to one")
            src.add_argument("--random", type=int, metavar="N", help="N random configs over --field")
            p.add_argument("--cap", type=int, default=ENUMERATION_CAP, help="enumeration cap (max 2^24)")

    p = sub.add_parser("field", help="construct a field and print its data")
    p.add_argument("--field", required=True)
    p.add_argument("--cap", type=int, default=ENUMERATION_CAP)
    common(p, configs=False)
    p.set_defaults(func=cmd_field)

    p = sub.add_parser("count", help="count primitive elements in the avoidance set two ways")
    common(p)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("verify-bounds", help="check the character-sum, divisor and count bounds")
    common(p)
    p.add_argument("--tamper", type=float, default=1.0, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify_bounds)

    p = sub.add_parser("threshold", help="least r from which the existence condition holds")
    p.add_argument("--q", type=int, required=True, choices=(3, 4, 5))
    p.add_argument("--mode", choices=(ANALYTIC, EXACT_SCAN), default=ANALYTIC)
    common(p, configs=False)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("table", help="limits of the right-hand side of the existence inequality")
    common(p, configs=False)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("canonicalize", help="rewrite hyperplanes in standard form")
    common(p)
    p.set_defaults(func=cmd_canonicalize)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NumericalDrift as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAULT
    except (PrimavoidError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc.__class__.__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
