"""Command line front end.

Subcommands: validate, conceal, bind, bounds, scan. Text output and the
structured JSON output are rendered from the same dictionary, so they never
disagree; JSON is dumped with sorted keys and scans default to CSV, which
makes every format byte deterministic for a fixed seed.

Exit codes: 0 on success, 2 for unreadable or invalid inputs, 3 when the
concealment bracket comes out inverted (a numerical inconsistency, not an
input problem).
"""

from __future__ import annotations

import argparse
import sys

from .bounds import (
    ScanBudgets,
    check_bounds,
    epsilon_delta_scan,
    minimize_kraus_gap,
    scan_to_csv,
)
from .binding import minimax_cheat
from .concealment import analyze_concealment
from .errors import BracketInversionError, ProtocolFileError, ProtocolValidationError
from .fileio import dump_json, jsonable, load_protocol, load_scan_config
from .protocol import validate


def _render_scalar(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _is_scalar(value) -> bool:
    return value is None or isinstance(value, (bool, int, float, str))


def _render_text(data, lines, indent=0):
    pad = "  " * indent
    if isinstance(data, dict):
        for key in sorted(data):
            value = data[key]
            if _is_scalar(value):
                lines.append(f"{pad}{key}: {_render_scalar(value)}")
            elif isinstance(value, list) and all(_is_scalar(v) for v in value):
                inline = ", ".join(_render_scalar(v) for v in value)
                lines.append(f"{pad}{key}: [{inline}]")
            else:
                lines.append(f"{pad}{key}:")
                _render_text(value, lines, indent + 1)
    elif isinstance(data, list):
        for i, value in enumerate(data):
            if _is_scalar(value):
                lines.append(f"{pad}[{i}] {_render_scalar(value)}")
            elif isinstance(value, list) and all(_is_scalar(v) for v in value):
                inline = ", ".join(_render_scalar(v) for v in value)
                lines.append(f"{pad}[{i}] [{inline}]")
            else:
                lines.append(f"{pad}[{i}]:")
                _render_text(value, lines, indent + 1)
    else:
        lines.append(f"{pad}{_render_scalar(data)}")


def render_report(data, fmt: str) -> str:
    """One report dictionary, rendered as text or structured JSON."""
    plain = jsonable(data)
    if fmt == "structured":
        return dump_json(plain)
    lines = []
    _render_text(plain, lines)
    return "\n".join(lines) + "\n"


def _emit(text: str, output) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_common(p, default_format="text", formats=("text", "structured")):
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--tol", type=float, default=None, help="solver tolerance")
    p.add_argument(
        "--format",
        choices=formats,
        default=default_format,
        help=f"output format (default {default_format})",
    )
    p.add_argument("--output", default=None, help="write output to this file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qbcommit",
        description="Numerical cheating analysis for Kraus-pair bit commitment protocols.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a protocol file for completeness")
    p.add_argument("protocol")
    _add_common(p)

    p = sub.add_parser("conceal", help="bracket Bob's distinguishing advantage")
    p.add_argument("protocol")
    _add_common(p)
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--ref-dim", type=int, default=None)

    p = sub.add_parser("bind", help="estimate Alice's best worst-case payoff")
    p.add_argument("protocol")
    _add_common(p)
    p.add_argument("--direction", choices=("01", "10"), default="01")
    p.add_argument("--outer-restarts", type=int, default=8)
    p.add_argument("--outer-iters", type=int, default=200)
    p.add_argument("--inner-restarts", type=int, default=16)
    p.add_argument(
        "--no-swapped",
        action="store_true",
        help="skip the swapped-direction report",
    )

    p = sub.add_parser("bounds", help="check both trade-off inequalities")
    p.add_argument("protocol")
    _add_common(p)
    p.add_argument("--restarts", type=int, default=8, help="norm solver restarts")
    p.add_argument("--states", type=int, default=10, help="sampled states per check")
    p.add_argument(
        "--minimize",
        action="store_true",
        help="also check at the gap-minimizing reindexing",
    )

    p = sub.add_parser("scan", help="trade-off scan over a protocol family")
    p.add_argument("config")
    _add_common(p, default_format="csv", formats=("csv", "text", "structured"))
    p.add_argument("--cb-restarts", type=int, default=8)
    p.add_argument("--outer-restarts", type=int, default=4)
    p.add_argument("--outer-iters", type=int, default=80)
    p.add_argument("--inner-restarts", type=int, default=8)

    return parser


def _cmd_validate(args) -> int:
    spec = load_protocol(args.protocol)
    report = validate(spec)
    _emit(render_report(report, args.format), args.output)
    return 0 if report.accepted else 2


def _cmd_conceal(args) -> int:
    spec = load_protocol(args.protocol)
    kwargs = {"restarts": args.restarts, "seed": args.seed, "ref_dim": args.ref_dim}
    if args.tol is not None:
        kwargs["tol"] = args.tol
    report = analyze_concealment(spec, **kwargs)
    _emit(render_report(report, args.format), args.output)
    return 0


def _cmd_bind(args) -> int:
    spec = load_protocol(args.protocol)
    kwargs = {
        "direction": args.direction,
        "outer_restarts": args.outer_restarts,
        "outer_iters": args.outer_iters,
        "inner_restarts": args.inner_restarts,
        "seed": args.seed,
        "include_swapped": not args.no_swapped,
    }
    if args.tol is not None:
        kwargs["tol"] = args.tol
    report = minimax_cheat(spec, **kwargs)
    _emit(render_report(report, args.format), args.output)
    return 0


def _cmd_bounds(args) -> int:
    spec = load_protocol(args.protocol)
    kwargs = {"n_states": args.states, "seed": args.seed, "cb_restarts": args.restarts}
    if args.tol is not None:
        kwargs["tol"] = args.tol
    identity_check = check_bounds(spec, **kwargs)
    report = {"identity": identity_check}
    if args.minimize:
        gap_min = minimize_kraus_gap(spec, seed=args.seed)
        report["minimized"] = check_bounds(spec, cheat=gap_min.unitary, **kwargs)
        report["minimized_gap"] = gap_min.value
    _emit(render_report(report, args.format), args.output)
    return 0


def _cmd_scan(args) -> int:
    config = load_scan_config(args.config)
    budgets = ScanBudgets(
        cb_restarts=args.cb_restarts,
        outer_restarts=args.outer_restarts,
        outer_iters=args.outer_iters,
        inner_restarts=args.inner_restarts,
        tol=args.tol if args.tol is not None else ScanBudgets.tol,
    )
    result = epsilon_delta_scan(
        config.family,
        config.params,
        budgets=budgets,
        seed=args.seed,
        label=config.label,
    )
    if args.format == "csv":
        _emit(scan_to_csv(result), args.output)
    else:
        _emit(render_report(result, args.format), args.output)
    return 0


_COMMANDS = {
    "validate": _cmd_validate,
    "conceal": _cmd_conceal,
    "bind": _cmd_bind,
    "bounds": _cmd_bounds,
    "scan": _cmd_scan,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ProtocolFileError, ProtocolValidationError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except BracketInversionError as exc:
        sys.stderr.write(f"inconsistent bounds: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
