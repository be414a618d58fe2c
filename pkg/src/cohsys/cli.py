"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 no certificate found.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

from .numerics import (
    CSType,
    CurveContext,
    SubTriple,
    alpha_slope,
    brill_noether_number,
    format_rational,
    parse_rational,
    slope_margin,
)
from .report import Report, report_g6
from .split import (
    SplitModel,
    coordinate_subtypes,
    equal_slope_alphas,
    parse_summands,
    proportional_subsets,
    realized_pairs,
    split_segre,
    split_semistable,
    total_type,
)
from .strata import (
    enumerate_stratum_labels,
    extension_stability_check,
    nonemptiness_certificate,
    rank1_moduli_dim,
    segre_value,
    stability_transfer_check,
    stratum_dim_bound,
)
from .walls import (
    AlphaWindow,
    alpha_of_subtype,
    chamber_partition,
    enumerate_virtual_criticals,
    prune_by_brill_noether,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_UNKNOWN = 3

DEFAULTS = {
    "general_curve": True,
    "format": "text",
    "depth": 2,
    "ext2": 0,
    "prune": True,
    "jobs": 1,
    "positivity": "stated",
    "allow_assumed": False,
    "approx": False,
    "keep_nonpositive_degree": False,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def parse_bool(text: str) -> bool:
    value = text.strip().lower()
    if value in ("true", "yes", "1", "on"):
        return True
    if value in ("false", "no", "0", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _approx(value: Fraction) -> str:
    with localcontext() as ctx:
        ctx.prec = 12
        return str(Decimal(value.numerator) / Decimal(value.denominator))


@dataclass
class Output:
    report: Report
    header: Optional[List[str]] = None
    rows: Optional[List[List[Any]]] = None
    text: Optional[str] = None
    exit_code: int = EXIT_OK


# -- flag groups -------------------------------------------------------------

def _curve_flags(p):
    p.add_argument("--genus", type=int)
    p.add_argument("--general-curve", type=parse_bool, metavar="BOOL")


def _common_flags(p):
    p.add_argument("--format", choices=["text", "json", "csv"])
    p.add_argument("--config", help="JSON file whose keys mirror the flags; flags win")


FLAG_GROUPS: Dict[str, Callable] = {
    "genus": _curve_flags,
    "type": lambda p: p.add_argument("--type", type=CSType.parse, metavar="N,D,K"),
    "alpha": lambda p: p.add_argument("--alpha", type=parse_rational, metavar="P/Q"),
    "window": lambda p: p.add_argument("--window", type=AlphaWindow.parse, metavar="LO,HI"),
    "mt": lambda p: (p.add_argument("--m", type=int), p.add_argument("--t", type=int)),
    "prune": lambda p: p.add_argument("--prune", type=parse_bool, nargs="?", const=True,
                                      metavar="BOOL"),
    "depth": lambda p: p.add_argument("--depth", type=int),
    "ext2": lambda p: p.add_argument("--ext2", type=int),
    "sub": lambda p: p.add_argument("--sub", type=SubTriple.parse, metavar="M,D',T"),
    "quot": lambda p: p.add_argument("--quot", type=CSType.parse, metavar="N,D,K"),
    "dims": lambda p: (p.add_argument("--dim1", type=int), p.add_argument("--dim2", type=int)),
    "jobs": lambda p: p.add_argument("--jobs", type=int, help="worker threads"),
    "approx": lambda p: p.add_argument("--approx", action="store_const", const=True,
                                       help="add a decimal column (non-authoritative)"),
    "degree": lambda p: p.add_argument(
        "--keep-nonpositive-degree", action="store_const", const=True,
        help="keep witnesses with sections but degree <= 0 (audit mode)"),
    "cert": lambda p: (
        p.add_argument("--positivity", choices=["stated", "c21"]),
        p.add_argument("--allow-assumed", action="store_const", const=True)),
    "model": lambda p: (
        p.add_argument("--model", help="JSON model file"),
        p.add_argument("--summands", help="d1:t1,d2:t2,..."),
    ),
}

COMMANDS: Dict[str, Sequence[str]] = {
    "slope": ("type", "alpha", "sub"),
    "beta": ("genus", "type"),
    "critical-values": ("genus", "type", "window", "prune", "jobs", "approx", "degree"),
    "chambers": ("genus", "type", "window", "prune", "jobs", "degree"),
    "strata": ("genus", "type", "alpha", "mt", "prune", "approx", "degree"),
    "check-transfer": ("type", "alpha", "sub"),
    "check-extension": ("alpha", "sub", "quot"),
    "certify": ("genus", "type", "alpha", "depth", "jobs", "cert"),
    "dim-bound": ("genus", "sub", "quot", "dims", "ext2"),
    "split-model": ("genus", "model", "alpha", "mt"),
    "report-g6": ("jobs",),
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cohsys", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    subs = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name, groups in COMMANDS.items():
        p = subs.add_parser(name)
        for g in groups:
            FLAG_GROUPS[g](p)
        _common_flags(p)
    return parser


# -- config merge ------------------------------------------------------------

_CONFIG_PARSERS: Dict[str, Callable[[Any], Any]] = {
    "genus": int,
    "general_curve": lambda v: v if isinstance(v, bool) else parse_bool(str(v)),
    "type": lambda v: CSType(*v) if isinstance(v, list) else CSType.parse(str(v)),
    "alpha": lambda v: parse_rational(str(v)),
    "window": lambda v: AlphaWindow.parse(",".join(map(str, v)) if isinstance(v, list) else v),
    "m": int,
    "t": int,
    "prune": lambda v: v if isinstance(v, bool) else parse_bool(str(v)),
    "depth": int,
    "ext2": int,
    "format": str,
    "jobs": int,
    "sub": lambda v: SubTriple(*v) if isinstance(v, list) else SubTriple.parse(str(v)),
    "quot": lambda v: CSType(*v) if isinstance(v, list) else CSType.parse(str(v)),
    "dim1": int,
    "dim2": int,
    "positivity": str,
    "allow_assumed": bool,
    "approx": bool,
    "keep_nonpositive_degree": bool,
    "model": str,
    "summands": lambda v: v if isinstance(v, str) else ",".join(f"{d}:{t}" for d, t in v),
}


def merge_config(args: argparse.Namespace) -> argparse.Namespace:
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        for raw_key, raw in data.items():
            key = raw_key.replace("-", "_")
            if key not in _CONFIG_PARSERS or not hasattr(args, key):
                raise UsageError(f"config key {raw_key!r} not valid for {args.command}")
            if getattr(args, key) is None:
                setattr(args, key, _CONFIG_PARSERS[key](raw))
    for key, value in DEFAULTS.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, value)
    if args.format not in ("text", "json", "csv"):
        raise UsageError(f"unknown format {args.format!r}")
    if getattr(args, "jobs", 1) < 1:
        raise UsageError("--jobs must be >= 1")
    return args


def _need(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise UsageError(f"{args.command} requires {flags}")


def _ctx(args) -> CurveContext:
    _need(args, "genus")
    return CurveContext(args.genus, args.general_curve)


def _inputs(args, *names) -> Dict[str, Any]:
    out = {}
    for n in names:
        v = getattr(args, n, None)
        if isinstance(v, Fraction):
            v = format_rational(v)
        elif isinstance(v, (CSType, SubTriple)):
            v = v.as_list()
        elif isinstance(v, AlphaWindow):
            v = v.to_list()
        out[n] = v
    return out


# -- subcommands -------------------------------------------------------------

def cmd_slope(args) -> Output:
    _need(args, "type", "alpha")
    slope = alpha_slope(args.type, args.alpha)
    result: Dict[str, Any] = {"slope": format_rational(slope)}
    lines = [f"slope = {format_rational(slope)}"]
    if args.sub is not None:
        wall = alpha_of_subtype(args.type, args.sub)
        result["sub_slope"] = format_rational(alpha_slope(args.sub.as_type(), args.alpha))
        result["margin"] = format_rational(slope_margin(args.type, args.sub, args.alpha))
        result["segre_value"] = format_rational(segre_value(args.alpha, args.type, args.sub))
        result["wall"] = None if wall is None else format_rational(wall)
        lines += [f"{k} = {v}" for k, v in result.items() if k != "slope"]
    report = Report("slope", _inputs(args, "type", "alpha", "sub"), result)
    return Output(report, ["key", "value"], [[k, v] for k, v in result.items()],
                  "\n".join(lines))


def cmd_beta(args) -> Output:
    ctx = _ctx(args)
    _need(args, "type")
    beta = brill_noether_number(ctx, args.type)
    report = Report("beta", _inputs(args, "genus", "type"), {"beta": beta})
    return Output(report, ["beta"], [[beta]], str(beta))


def _walls(args):
    ctx = _ctx(args)
    _need(args, "type")
    window = args.window or AlphaWindow.default_for(args.type)
    walls = enumerate_virtual_criticals(
        args.type, window, positive_degree=not args.keep_nonpositive_degree,
        workers=args.jobs)
    notes = []
    if args.prune:
        if not ctx.general_curve:
            notes.append("pruning requested but the curve is not general; walls left virtual")
        walls = prune_by_brill_noether(ctx, args.type, walls)
    return ctx, window, walls, notes


def _witness_text(ws) -> str:
    return " ".join(f"({w.m},{w.dprime},{w.t})" for w in ws) or "-"


def cmd_critical_values(args) -> Output:
    _, window, walls, notes = _walls(args)
    report = Report("critical-values",
                    _inputs(args, "genus", "general_curve", "type", "prune") | {
                        "window": window.to_list()},
                    {"walls": [w.to_dict() for w in walls]}, notes)
    header = ["value", "status", "witnesses", "pruned_witnesses"]
    rows = [[format_rational(w.value), w.status, _witness_text(w.witnesses),
             _witness_text([x for x, _ in w.pruned_witnesses])] for w in walls]
    if args.approx:
        header.append("approx (non-authoritative)")
        for row, w in zip(rows, walls):
            row.append(_approx(w.value))
    return Output(report, header, rows)


def cmd_chambers(args) -> Output:
    _, window, walls, notes = _walls(args)
    part = chamber_partition(args.type, window, walls)
    report = Report("chambers",
                    _inputs(args, "genus", "general_curve", "type", "prune") | {
                        "window": window.to_list()},
                    {"walls": [format_rational(w.value) for w in part.walls],
                     "chambers": [c.to_dict() for c in part.chambers]}, notes)
    rows = [[c.label, c.to_dict()["lo"], c.to_dict()["hi"]] for c in part.chambers]
    return Output(report, ["chamber", "lo", "hi"], rows)


def cmd_strata(args) -> Output:
    ctx = _ctx(args)
    _need(args, "type", "alpha")
    T = args.type
    if (args.m is None) != (args.t is None):
        raise UsageError("give both --m and --t, or neither")
    pairs = ([(args.m, args.t)] if args.m is not None
             else [(m, t) for m in range(1, T.n) for t in range(T.k + 1)])
    strata = []
    rows = []
    for m, t in pairs:
        labels = enumerate_stratum_labels(
            ctx, T, m, t, args.alpha, args.prune,
            positive_degree=not args.keep_nonpositive_degree)
        strata.append({"m": m, "t": t, "labels": [lab.to_dict() for lab in labels]})
        for lab in labels:
            row = [m, t, lab.text(), "" if lab.witness_dprime is None else lab.witness_dprime]
            if args.approx:
                row.append("" if lab.s is None else _approx(lab.s))
            rows.append(row)
    header = ["m", "t", "s", "dprime"] + (["approx (non-authoritative)"] if args.approx else [])
    report = Report("strata",
                    _inputs(args, "genus", "general_curve", "type", "alpha", "prune"),
                    {"strata": strata})
    return Output(report, header, rows)


def cmd_check_transfer(args) -> Output:
    _need(args, "type", "alpha", "sub")
    verdict = stability_transfer_check(args.alpha, args.type, args.sub)
    result = verdict.to_dict()
    report = Report("check-transfer", _inputs(args, "type", "alpha", "sub"), result)
    return Output(report, ["key", "value"], _kv_rows(result))


def cmd_check_extension(args) -> Output:
    _need(args, "alpha", "sub", "quot")
    verdict = extension_stability_check(args.alpha, args.sub.as_type(), args.quot)
    result = verdict.to_dict()
    report = Report("check-extension", _inputs(args, "alpha", "sub", "quot"), result)
    return Output(report, ["key", "value"], _kv_rows(result))


def cmd_certify(args) -> Output:
    ctx = _ctx(args)
    _need(args, "type", "alpha")
    cert = nonemptiness_certificate(ctx, args.alpha, args.type, args.depth,
                                    allow_assumed=args.allow_assumed,
                                    positivity=args.positivity, workers=args.jobs)
    inputs = _inputs(args, "genus", "general_curve", "type", "alpha", "depth", "positivity",
                     "allow_assumed")
    if cert is None:
        report = Report("certify", inputs, {"verdict": "unknown", "certificate": None},
                        ["no splitting satisfies the hypotheses; non-emptiness not decided"])
        return Output(report, ["verdict"], [["unknown"]], "unknown", EXIT_UNKNOWN)
    result = {"verdict": "nonempty", "certificate": cert.to_dict()}
    report = Report("certify", inputs, result)
    text = (f"nonempty: G({format_rational(cert.alpha)};{args.type.n},{args.type.d},"
            f"{args.type.k};{cert.left.n},{cert.left.k};{format_rational(cert.stratum_segre)})\n"
            f"splitting {cert.left} + {cert.right}\n"
            f"unit value {cert.unit_value}, ext positivity ({cert.positivity_rule}) "
            f"{cert.positivity}\n"
            f"left: {cert.left_why.kind}, right: {cert.right_why.kind}")
    return Output(report, ["key", "value"], _kv_rows(result), text)


def _piece_dim(ctx, piece: CSType, given: Optional[int], flag: str) -> int:
    if given is not None:
        return given
    if piece.n == 1 and ctx.general_curve:
        dim = rank1_moduli_dim(ctx, piece.d, piece.k)
        if dim is None:
            raise UsageError(f"no line systems of type {piece} on a general curve")
        return dim
    raise UsageError(f"{flag} is required for piece {piece}")


def cmd_dim_bound(args) -> Output:
    ctx = _ctx(args)
    _need(args, "sub", "quot")
    T1 = args.sub.as_type()
    dim1 = _piece_dim(ctx, T1, args.dim1, "--dim1")
    dim2 = _piece_dim(ctx, args.quot, args.dim2, "--dim2")
    bound = stratum_dim_bound(ctx, T1, args.quot, dim1, dim2, args.ext2)
    result = {"bound": bound, "dim1": dim1, "dim2": dim2, "ext2": args.ext2}
    report = Report("dim-bound", _inputs(args, "genus", "sub", "quot", "ext2"), result)
    return Output(report, ["key", "value"], _kv_rows(result), str(bound))


def cmd_split_model(args) -> Output:
    if args.model and args.summands:
        raise UsageError("give --model or --summands, not both")
    if args.model:
        model = SplitModel.load(args.model)
    else:
        _need(args, "summands")
        model = SplitModel(_ctx(args), tuple(parse_summands(args.summands)))
    total = total_type(model)
    result: Dict[str, Any] = {
        "model": model.to_dict(),
        "total_type": total.as_list(),
        "coordinate_subtypes": [
            {"subset": list(s), "type": T.as_list()} for s, T in coordinate_subtypes(model)],
        "equal_slope_alphas": [
            {"alpha": format_rational(a), "subsets": [list(s) for s in subs]}
            for a, subs in equal_slope_alphas(model)],
        "alpha_independent": [list(s) for s in proportional_subsets(model)],
    }
    if args.alpha is not None:
        v = split_semistable(model, args.alpha)
        result["semistable"] = v.semistable
        result["violators"] = [list(s) for s in v.violators]
        pairs = ([(args.m, args.t)] if args.m is not None and args.t is not None
                 else realized_pairs(model))
        segre = []
        for m, t in pairs:
            if not 0 < m < total.n:
                continue
            s = split_segre(model, args.alpha, m, t)
            segre.append({"m": m, "t": t, "s": "inf" if s is None else format_rational(s)})
        result["segre"] = segre
    report = Report("split-model", {"model": model.to_dict(),
                                    "alpha": _inputs(args, "alpha")["alpha"]}, result)
    return Output(report, ["key", "value"], _kv_rows(result))


def cmd_report_g6(args) -> Output:
    report = report_g6(workers=args.jobs)
    return Output(report, ["key", "value"], _kv_rows(report.result))


HANDLERS = {
    "slope": cmd_slope,
    "beta": cmd_beta,
    "critical-values": cmd_critical_values,
    "chambers": cmd_chambers,
    "strata": cmd_strata,
    "check-transfer": cmd_check_transfer,
    "check-extension": cmd_check_extension,
    "certify": cmd_certify,
    "dim-bound": cmd_dim_bound,
    "split-model": cmd_split_model,
    "report-g6": cmd_report_g6,
}


# -- rendering ---------------------------------------------------------------

def _flatten(value: Any, prefix: str = "") -> List[List[str]]:
    if isinstance(value, dict):
        rows = []
        for k, v in value.items():
            rows += _flatten(v, f"{prefix}.{k}" if prefix else str(k))
        return rows
    if isinstance(value, list) and any(isinstance(v, (dict, list)) for v in value):
        rows = []
        for i, v in enumerate(value):
            rows += _flatten(v, f"{prefix}[{i}]")
        return rows
    if isinstance(value, list):
        sep = "; " if any(isinstance(v, str) and " " in v for v in value) else " "
        return [[prefix, sep.join(map(_scalar, value))]]
    return [[prefix, _scalar(value)]]


def _scalar(v: Any) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def _kv_rows(result: dict) -> List[List[str]]:
    return _flatten(result)


def _table(header: List[str], rows: List[List[Any]]) -> str:
    cells = [header] + [[_scalar(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    return "\n".join(lines)


def render(out: Output, fmt: str) -> str:
    if fmt == "json":
        return out.report.to_json()
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(out.header)
        writer.writerows(out.rows)
        return buf.getvalue()
    body = out.text if out.text is not None else _table(out.header, out.rows)
    notes = "".join(f"\nnote: {n}" for n in out.report.notes)
    return body + notes + "\n"


def main(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
        args = merge_config(args)
        out = HANDLERS[args.command](args)
    except (UsageError, ValueError, TypeError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INVALID
    stdout.write(render(out, args.format))
    return out.exit_code


if __name__ == "__main__":
    sys.exit(main())
