"""Command-line entry point.

Subcommands: ``validate`` checks a scenario document and reports every
problem; ``run`` executes any experiment; ``sweep`` is ``run`` restricted
to povm-sweep scenarios. ``--describe-schema`` dumps the document and
output schemas as JSON. Exit codes: 0 success, 2 validation error,
3 numeric tolerance breach.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from .errors import NumericToleranceError, ScenarioValidationError
from .scenario import (
    OUTPUT_DIR_ENV,
    describe_schema,
    emit,
    load_scenario,
    run,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relgauss",
        description="Relational Gaussian-state experiments: translation "
                    "twirl, capacitor-model extraction energetics, and "
                    "binned-position measurement sweeps.")
    parser.add_argument("--describe-schema", action="store_true",
                        help="print the scenario/result schema as JSON and exit")
    sub = parser.add_subparsers(dest="command")

    p_validate = sub.add_parser("validate", help="validate a scenario document")
    p_validate.add_argument("scenario", help="path to the scenario file")

    for name, helptext in (("run", "run any experiment"),
                           ("sweep", "run a povm-sweep scenario")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("scenario", help="path to the scenario file")
        p.add_argument("--out", default=None,
                       help="output directory (default: scenario setting, "
                            f"then ${OUTPUT_DIR_ENV}, then '.')")
        p.add_argument("--format", default=None, choices=["csv", "json", "both"],
                       help="artifact format (default: scenario setting)")
    return parser


def _resolve_out_dir(scenario, override):
    if override:
        return override
    if scenario.output_directory:
        return scenario.output_directory
    return os.environ.get(OUTPUT_DIR_ENV, ".")


def _formats(scenario, override):
    fmt = override or scenario.output_format or "both"
    return ("csv", "json") if fmt == "both" else (fmt,)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    if args.describe_schema:
        print(json.dumps(describe_schema(), indent=2))
        return 0
    if args.command is None:
        parser.print_help()
        return 0

    try:
        scenario = load_scenario(args.scenario)
    except ScenarioValidationError as exc:
        print("scenario validation failed:", file=sys.stderr)
        for problem in exc.problems:
            print(f"  - {problem}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"cannot read scenario: {exc}", file=sys.stderr)
        return 2

    if args.command == "validate":
        print(f"scenario {scenario.name!r} ({scenario.experiment}) is valid")
        return 0

    if args.command == "sweep" and scenario.experiment != "povm-sweep":
        print("sweep requires a povm-sweep scenario; "
              f"this one declares {scenario.experiment!r}", file=sys.stderr)
        return 2

    started = time.perf_counter()
    try:
        record = run(scenario)
    except NumericToleranceError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except ScenarioValidationError as exc:
        print(f"scenario {scenario.name!r} failed: {exc}", file=sys.stderr)
        return 2
    elapsed = time.perf_counter() - started

    out_dir = _resolve_out_dir(scenario, args.out)
    try:
        paths = emit(record, out_dir, _formats(scenario, args.format))
    except OSError as exc:
        print(f"cannot write results: {exc}", file=sys.stderr)
        return 2
    # timing goes to stderr only; artifacts stay byte-identical across runs
    print(f"{scenario.name}: {len(record.rows)} rows in {elapsed:.3f}s",
          file=sys.stderr)
    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
