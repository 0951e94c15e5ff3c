"""Command-line entry point: `aptree analyze | scan | catalog`.

Exit codes: 0 when a verdict was reached, 2 when the classification is inconclusive, 1 when the
configuration is invalid or a file cannot be read or written.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import sys
import time
from collections.abc import Sequence
from pathlib import Path
from typing import Any, TextIO

from pydantic import ValidationError

from . import _debug, enable_verbose_stdout_logging
from .admissibility import classify, doubling_sup
from .ap import DEFAULT_FAR_C, ApParams, ap_sup, ap_value
from .catalog import listing
from .config import RunConfig, load_config
from .exceptions import AptreeException, UserError
from .geometry import TreeSpace
from .logger import logger
from .measures import ball_measure
from .oracle import build_discrete_tree, discrete_ap_value, discrete_ball_measure
from .scan import SupEstimate
from .tracing import JsonlFileExporter, SimpleSpanProcessor, add_trace_processor, trace
from .version import __version__

EXIT_DECIDED = 0
EXIT_INVALID = 1
EXIT_INCONCLUSIVE = 2

CSV_COLUMNS = ("t", "r", "value", "kind")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aptree",
        description="Ap conditions, doubling and Poincaré evidence on radially weighted trees.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging level for the aptree logger (default: WARNING)",
    )
    parser.add_argument("--trace-out", type=Path, help="Append spans to this JSONL file")
    commands = parser.add_subparsers(dest="command", metavar="{analyze,scan,catalog}")
    commands.required = True

    analyze = commands.add_parser("analyze", help="Classify a weight pair and write a report")
    analyze.add_argument("--config", type=Path, required=True, help="Run document (JSON)")
    analyze.add_argument("--p", type=float, help="Override the exponent")
    analyze.add_argument("--mode", choices=["auto", "full", "far"], help="Override the regime")
    analyze.add_argument("--c", type=float, help="Override the far-from-root constant")
    analyze.add_argument("--out", type=Path, help="Report path; stdout when omitted")

    scan = commands.add_parser("scan", help="Write the scanned grid as CSV")
    scan.add_argument("--config", type=Path, required=True, help="Run document (JSON)")
    scan.add_argument("--out", type=Path, help="CSV path; stdout when omitted")

    catalog = commands.add_parser("catalog", help="List the built-in weight pairs")
    catalog.add_argument("--json", action="store_true", help="Print the listing as JSON")

    # Debugging aid, deliberately left out of the command list.
    oracle = commands.add_parser("oracle")
    oracle.add_argument("--config", type=Path, required=True)
    oracle.add_argument("--t", type=float, required=True)
    oracle.add_argument("--r", type=float, required=True)
    oracle.add_argument("--depth", type=int, default=12)
    oracle.add_argument("--subdivisions", type=int, default=16)
    return parser


def _configure_logging(level: str) -> None:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    logger.setLevel(level)
    if _debug.VERBOSE_STDOUT_LOGS:
        enable_verbose_stdout_logging()


def _overridden(config: RunConfig, args: argparse.Namespace) -> RunConfig:
    updates: dict[str, Any] = {}
    for name in ("p", "mode", "c"):
        value = getattr(args, name, None)
        if value is not None:
            updates[name] = value
    if not updates:
        return config
    # Round-trip through validation so overrides obey the same constraints as the document.
    data = config.model_dump(by_alias=True)
    data.update(updates)
    return RunConfig.model_validate(data)


def _dump_json(payload: Any, out: Path | None) -> None:
    text = json.dumps(payload, indent=2, allow_nan=False, default=str)
    if out is None:
        sys.stdout.write(text + "\n")
    else:
        out.write_text(text + "\n", encoding="utf-8")


def _far_c(config: RunConfig, mode: str) -> float | None:
    if mode != "far":
        return None
    return config.c if config.c is not None else DEFAULT_FAR_C


def cmd_analyze(config: RunConfig, out: Path | None = None) -> int:
    """Runs the classifier and writes the JSON report. Returns the exit code."""
    tol = config.tolerance.resolve()
    domain = config.scan.resolve()
    rule = config.divergence.resolve()
    space = config.tree.build(tol)
    mode = config.resolved_mode(space.K)

    started = time.perf_counter()
    with trace("analyze", metadata={"tree": space.describe(), "p": config.p}):
        verdict = classify(
            space,
            config.p,
            mode=mode,
            c=_far_c(config, mode),
            domain=domain,
            tol=tol,
            rule=rule,
            seed=config.seed,
            certificate_sample=config.certificate_sample,
            workers=config.workers,
            C_d=config.doubling_constant,
            C_P=config.poincare_constant,
        )
    elapsed = time.perf_counter() - started

    report = {
        "aptree_version": __version__,
        "config": config.model_dump(mode="json", by_alias=True),
        "tree": space.describe(),
        "verdict": verdict.export(),
        "wall_clock_s": elapsed,
        "tolerance": dataclasses.asdict(tol),
        "scan_domain": dataclasses.asdict(domain),
        "divergence_rule": dataclasses.asdict(rule),
    }
    _dump_json(report, out or config.output.report)
    logger.info(f"analyze: {verdict.classification} in {elapsed:.2f}s")
    if verdict.classification == "inconclusive":
        return EXIT_INCONCLUSIVE
    return EXIT_DECIDED


def _write_rows(stream: TextIO, estimates: Sequence[SupEstimate]) -> int:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    rows = 0
    for estimate in estimates:
        for cell in estimate.samples:
            writer.writerow([repr(cell.t), repr(cell.r), repr(cell.value), estimate.kind])
            rows += 1
    return rows


def cmd_scan(config: RunConfig, out: Path | None = None) -> int:
    """Writes every scanned Ap (or A1) cell and every doubling-ratio cell as CSV rows."""
    tol = config.tolerance.resolve()
    domain = config.scan.resolve()
    rule = config.divergence.resolve()
    space = config.tree.build(tol)
    mode = config.resolved_mode(space.K)
    params = ApParams(p=config.p, mode=mode, c=_far_c(config, mode) or DEFAULT_FAR_C)

    with trace("scan", metadata={"tree": space.describe(), "p": config.p}):
        ap = ap_sup(space, params, domain, tol, rule, config.workers)
        doubling = doubling_sup(space, domain, tol, rule, config.workers)

    target = out or config.output.grid
    if target is None:
        rows = _write_rows(sys.stdout, [ap, doubling])
    else:
        with target.open("w", encoding="utf-8", newline="") as f:
            rows = _write_rows(f, [ap, doubling])
    logger.info(f"scan: wrote {rows} rows")
    return EXIT_DECIDED


def cmd_catalog(as_json: bool = False, stream: TextIO | None = None) -> int:
    """Prints the built-in weight pairs with their provenance."""
    stream = stream or sys.stdout
    rows = listing()
    if as_json:
        stream.write(json.dumps(rows, indent=2, allow_nan=False) + "\n")
        return EXIT_DECIDED
    width = max(len(row["name"]) for row in rows)
    for row in rows:
        stream.write(
            f"{row['name']:<{width}}  K={row['K']}  {row['description']}  "
            f"[{row['provenance']}]\n"
        )
    return EXIT_DECIDED


def cmd_oracle(space: TreeSpace, p: float, t: float, r: float, depth: int, M: int) -> int:
    tree = build_discrete_tree(space, depth, M)
    node = tree.node_at(t)
    payload: dict[str, Any] = {
        "t": t,
        "r": r,
        "depth": depth,
        "subdivisions": M,
        "ball": {
            "oracle": discrete_ball_measure(tree, node, r),
            "continuum": ball_measure(space, t, r),
        },
    }
    if p > 1:
        payload["ap"] = {
            "oracle": discrete_ap_value(tree, p, node, r),
            "continuum": ap_value(space, p, t, r),
        }
    _dump_json(payload, None)
    return EXIT_DECIDED


def _run(args: argparse.Namespace) -> int:
    if args.command == "catalog":
        return cmd_catalog(as_json=args.json)

    config = _overridden(load_config(args.config), args)
    trace_path = args.trace_out or config.output.trace
    if trace_path is not None:
        add_trace_processor(SimpleSpanProcessor(JsonlFileExporter(trace_path)))

    if args.command == "analyze":
        return cmd_analyze(config, args.out)
    if args.command == "scan":
        return cmd_scan(config, args.out)
    if args.command == "oracle":
        space = config.tree.build(config.tolerance.resolve())
        return cmd_oracle(space, config.p, args.t, args.r, args.depth, args.subdivisions)
    raise UserError(f"Unknown command {args.command!r}")


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    _configure_logging(args.log_level)
    try:
        return _run(args)
    except ValidationError as e:
        print(f"aptree: invalid configuration\n{e}", file=sys.stderr)
    except (UserError, OSError, json.JSONDecodeError) as e:
        print(f"aptree: {e}", file=sys.stderr)
    except AptreeException as e:
        print(f"aptree: {type(e).__name__}: {e}", file=sys.stderr)
    return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
