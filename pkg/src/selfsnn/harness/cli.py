"""Command line: ``run``, ``list`` and ``export``.

Exit status: 0 when every acceptance check passed, 1 when a check failed,
2 for usage or configuration errors.
"""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, ExperimentConfig
from .registry import list_experiments
from .runner import export_results, run_experiment


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="selfsnn", description="Run and export spiking self-model experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment")
    run.add_argument("experiment")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--set", dest="sets", action="append", default=[], metavar="KEY=VALUE",
                     help="parameter override; repeatable")
    run.add_argument("--config", default=None, help="YAML file with seed and params")
    run.add_argument("--out", default=None, help="output root (default: out)")

    sub.add_parser("list", help="list registered experiments")

    exp = sub.add_parser("export", help="collect run summaries into one file")
    exp.add_argument("run_dir")
    exp.add_argument("--format", choices=("json", "csv"), default="json")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list":
        for e in list_experiments():
            print(f"{e['name']:<22} {e['level']}  {e['description']}")
        return 0
    if args.command == "export":
        try:
            print(export_results(args.run_dir, args.format))
        except FileNotFoundError as err:
            print(f"error: {err}", file=sys.stderr)
            return 2
        return 0
    try:
        cfg = ExperimentConfig.build(args.experiment, args.seed, args.sets, args.config, args.out)
    except (ConfigError, KeyError, OSError) as err:
        msg = err.args[0] if isinstance(err, KeyError) else err
        print(f"error: {msg}", file=sys.stderr)
        return 2
    result = run_experiment(cfg)
    for name, ok in result.checks.items():
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
    print(f"summary: {result.run_dir / 'summary.json'}")
    return 0 if result.passed else 1


if __name__ == "__main__":
    sys.exit(main())
