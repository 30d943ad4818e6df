"""Command line: resultlab <experiment> [--param key=value]... [--key value]..."""
from __future__ import annotations

import argparse
import sys

from .harness import (
    BadParameterError,
    ExperimentConfig,
    UnknownExperimentError,
    get_experiment,
    list_experiments,
    run_experiment,
)


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="resultlab", description="Run a registered experiment and write its report.")
    ap.add_argument("experiment", nargs="?", help="experiment name (see --list)")
    ap.add_argument("--list", action="store_true", help="list experiments and exit")
    ap.add_argument("--describe", action="store_true", help="show the experiment's parameters and exit")
    ap.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trials", type=int, default=1)
    ap.add_argument("--out", default=None, help="output path (default: stdout)")
    ap.add_argument("--format", choices=("csv", "json"), default="csv")
    return ap


def _free_options(extra: list[str]) -> dict[str, str]:
    """Turn ['--n-max', '8', '--emit-all=true'] into {'n-max': '8', 'emit-all': 'true'}."""
    out: dict[str, str] = {}
    i = 0
    while i < len(extra):
        tok = extra[i]
        if not tok.startswith("--") or len(tok) == 2:
            raise BadParameterError(tok, "expected --key value")
        key = tok[2:]
        if "=" in key:
            key, value = key.split("=", 1)
            i += 1
        elif i + 1 < len(extra) and not extra[i + 1].startswith("--"):
            value = extra[i + 1]
            i += 2
        else:
            value = "true"
            i += 1
        out[key] = value
    return out


def main(argv: list[str] | None = None) -> int:
    ap = _parser()
    args, extra = ap.parse_known_args(argv)
    try:
        if args.list:
            for name in list_experiments():
                print(name)
            return 0
        if not args.experiment:
            ap.print_usage(sys.stderr)
            return 2
        exp = get_experiment(args.experiment)
        if args.describe:
            print(f"{exp.name}: {exp.description}")
            for key, prm in exp.params.items():
                print(f"  --{key.replace('_', '-')} ({prm.kind}, default {prm.default!r}) {prm.help}")
            print("  flags: " + ", ".join(exp.flags))
            return 0
        params = _free_options(extra)
        for item in args.param:
            if "=" not in item:
                raise BadParameterError(item, "expected key=value")
            key, value = item.split("=", 1)
            params[key.strip()] = value.strip()
        config = ExperimentConfig(args.experiment, params, args.seed, args.trials, args.out, args.format)
        report = run_experiment(config)
    except (UnknownExperimentError, BadParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if not args.out:
        sys.stdout.write(report.serialize())
    for name, ok in report.pass_flags.items():
        print(f"{'PASS' if ok else 'FAIL'} {name}", file=sys.stderr)
    print(f"wall time {report.wall_time_seconds:.2f}s", file=sys.stderr)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
