"""Command-line interface: list scenarios, run them, emit artifacts.

Exit codes: 0 success, 2 configuration error, 3 integration failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, load_scenario
from .runner import EXIT_CONFIG, EXIT_INTEGRATION, EXIT_OK, run_scenario
from .scenarios import REGISTRY, get_scenario, list_scenarios


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="densys",
        description="Density-system simulations, region maps, and density-shaped control loops.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="list registered scenarios")

    run = sub.add_parser("run", help="run a registered scenario id or a JSON config file")
    run.add_argument("target", help="scenario id (see `densys list`) or path to a config file")
    run.add_argument("--out", default="out", help="output directory (default: ./out)")
    run.add_argument("--jobs", type=int, default=1, help="parallel workers for multi-seed sweeps")
    run.add_argument("--rtol", type=float, default=None, help="override relative tolerance")
    run.add_argument("--atol", type=float, default=None, help="override absolute tolerance")
    run.add_argument("--t-end", type=float, default=None, help="override horizon")
    run.add_argument(
        "--plot", action="store_true", help="render PNG figures alongside the CSV output"
    )
    return ap


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "list":
        rows = list_scenarios()
        width = max(len(r["id"]) for r in rows)
        fwidth = max(len(r["figure"]) for r in rows)
        for r in rows:
            print(f"{r['id']:<{width}}  {r['figure']:<{fwidth}}  {r['description']}")
        return EXIT_OK

    target = args.target
    try:
        if target in REGISTRY:
            sc = get_scenario(target)
            sid = target
        elif Path(target).exists():
            sc = load_scenario(target)
            sid = Path(target).stem
        else:
            print(
                f"error: {target!r} is neither a registered scenario nor a config file",
                file=sys.stderr,
            )
            return EXIT_CONFIG
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_CONFIG

    try:
        outcome = run_scenario(
            sc,
            sid,
            args.out,
            jobs=args.jobs,
            plot=args.plot,
            rtol=args.rtol,
            atol=args.atol,
            t_end=args.t_end,
        )
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"integration error: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    print(outcome.summary)
    for f in outcome.files:
        print(f"  wrote {f}")
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
