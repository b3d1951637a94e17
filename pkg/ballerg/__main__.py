#!/usr/bin/env python3
"""
Composition operators on the unit ball: experiment runner

Runs the built-in experiments and writes trace.csv, report.json, summary.txt
and plot-ready .dat files per experiment.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from .config import load_config_file
from .exceptions import BallergError, ConfigError
from .experiments import CATALOG
from .runner import EXIT_INVALID_CONFIG, exit_status, prepare_configs, run_batch


def list_experiments() -> None:
    """Print the catalog with the statement each experiment checks."""
    width = max(len(experiment_id) for experiment_id in CATALOG)
    for experiment in CATALOG.values():
        print(f"{experiment.id:<{width}}  {experiment.title}")
        print(f"{'':<{width}}  checks: {experiment.statement}")


def _selected_ids(ids: List[str], config_path: Optional[Path]) -> List[str]:
    if ids:
        return ids
    if config_path is not None:
        named = load_config_file(config_path).get("experiment")
        if named:
            return [named]
    raise ConfigError("Name at least one experiment id (or 'all'), or give a config with an 'experiment' key")


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for the script."""
    parser = argparse.ArgumentParser(prog="ballerg", description="Composition-operator experiments on the unit ball")
    commands = parser.add_subparsers(dest="command", required=True)

    run_parser = commands.add_parser("run", help="Run one or more experiments")
    run_parser.add_argument("ids", nargs="*", help="Experiment ids, or 'all'")
    run_parser.add_argument("--config", type=Path, default=None, help="Path to a JSON config file")
    run_parser.add_argument("-o", "--out", type=Path, default=None, help="Output directory (default: output)")
    run_parser.add_argument("-j", "--jobs", type=int, default=1, help="Experiments to run concurrently (default: 1)")
    run_parser.add_argument("-q", "--quiet", action="store_true", help="Suppress progress lines")

    commands.add_parser("list", help="List the experiment catalog")
    args = parser.parse_args(argv)

    if args.command == "list":
        list_experiments()
        return 0

    try:
        if args.jobs < 1:
            raise ConfigError(f"--jobs must be at least 1, got {args.jobs}")
        configs = prepare_configs(_selected_ids(args.ids, args.config), args.config, args.out)
    except BallergError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INVALID_CONFIG

    if not args.quiet:
        print(f"Running {len(configs)} experiment(s) with seed {configs[0].seed}...")
    outcomes = run_batch(configs, jobs=args.jobs, quiet=args.quiet)
    for outcome in outcomes:
        if outcome.error:
            print(f"Error: {outcome.experiment}: {outcome.error}", file=sys.stderr)
        elif not outcome.passed:
            for check in outcome.result.failed_checks:
                print(f"Failed: {outcome.experiment}: {check.name} (value {check.value}, bound {check.bound})")

    status = exit_status(outcomes)
    if not args.quiet:
        out = args.out or Path("output")
        print(f"\nDone! Artifacts are in '{out}'.")
    return status


if __name__ == "__main__":
    sys.exit(main())
