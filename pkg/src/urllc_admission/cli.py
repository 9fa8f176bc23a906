"""Command line: ``urllc-admission run | sweep | oracle-compare``."""
from __future__ import annotations

import argparse
import contextlib
import json
import logging
import sys
from typing import Sequence

from . import harness
from .model import ConfigError, SystemConfig, config_from_dict, load_config
from .validation import check_config


def _override(text: str) -> tuple[str, object]:
    key, sep, raw = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip(), value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file (missing keys keep their defaults)")
    common.add_argument("--set", dest="overrides", action="append", type=_override, default=[],
                        metavar="KEY=VALUE", help="override one config field; may repeat")
    common.add_argument("--case", type=int, choices=[1, 2], help="fixed bandwidth split: 1 = 3/4 eMBB, 2 = 1/2")
    common.add_argument("--out", help="output CSV path (default: stdout)")
    common.add_argument("-v", "--verbose", action="count", default=0)

    batch = argparse.ArgumentParser(add_help=False)
    batch.add_argument("--seeds", default="0..19", help="seed list, e.g. 0..19 or 1,5,9 (default 0..19)")
    batch.add_argument("--workers", type=int, default=1, help="worker processes")
    batch.add_argument("--no-timing", action="store_true", help="write NA instead of wall-clock runtimes")

    p = argparse.ArgumentParser(prog="urllc-admission", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", parents=[common], help="one scenario, per-iteration trace")
    r.add_argument("--seed", type=int, default=0)
    s = sub.add_parser("sweep", parents=[common, batch], help="Monte-Carlo sweep along one axis")
    s.add_argument("--axis", required=True, choices=sorted(harness.AXES))
    s.add_argument("--grid", required=True, type=harness.parse_grid,
                   help="comma-separated values (Mbps for rtarget, MHz for btotal, count for jcount)")
    s.add_argument("--oracle", action="store_true", help="also run the exhaustive search")
    o = sub.add_parser("oracle-compare", parents=[common, batch], help="algorithm vs exhaustive search")
    o.add_argument("--no-oracle", action="store_true", help="skip the oracle; its columns hold NA")
    return p


def resolve_config(args: argparse.Namespace) -> SystemConfig:
    cfg = load_config(args.config) if args.config else SystemConfig()
    if args.overrides:
        merged = cfg.to_dict()
        merged.update(dict(args.overrides))
        cfg = config_from_dict(merged)
    return check_config(harness.with_case(cfg, args.case))


@contextlib.contextmanager
def _output(path: str | None):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
    try:
        cfg = resolve_config(args)
    except (ConfigError, KeyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        if args.command == "run":
            _, rows = harness.cmd_run(cfg, args.seed)
            columns = harness.TRACE_COLUMNS
        elif args.command == "sweep":
            rows = harness.cmd_sweep(cfg, args.axis, args.grid, harness.parse_seeds(args.seeds),
                                     with_oracle=args.oracle, timing=not args.no_timing, workers=args.workers)
            columns = harness.SWEEP_COLUMNS
        else:
            rows = harness.cmd_oracle_compare(cfg, harness.parse_seeds(args.seeds), with_oracle=not args.no_oracle,
                                              timing=not args.no_timing, workers=args.workers)
            columns = harness.COMPARE_COLUMNS
    except harness.UrllcInfeasible as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    with _output(args.out) as fh:
        harness.write_csv(rows, columns, fh)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
