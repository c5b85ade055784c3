"""Command-line entry point.

  speclab list
  speclab run <experiment> [--config FILE] [--N ...] [--tend ...] [--out DIR] ...
  speclab emit-config <experiment> [--config FILE] [...]

Exit codes: 0 success, 2 configuration error, 3 numerical blow-up or abort.
"""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, emit_config
from .experiments import REGISTRY, effective_config, run_experiment


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("experiment", help="registered experiment name (see 'speclab list')")
    parser.add_argument("--config", metavar="FILE", help="flat key = value config file")
    parser.add_argument("--N", dest="n_values", metavar="LIST",
                        help="comma-separated degrees, e.g. 64,128,256")
    parser.add_argument("--tend", metavar="T", help="final time")
    parser.add_argument("--dt", metavar="DT", help="fixed time step (default: from cfl)")
    parser.add_argument("--seed", metavar="SEED", help="seed for random initial data")
    parser.add_argument("--variant", metavar="NAME", help="spectral | two_thirds | sv")
    parser.add_argument("--out", metavar="DIR", help="output directory")
    parser.add_argument("--set", dest="assignments", action="append", default=[],
                        metavar="KEY=VALUE", help="override any config key (repeatable)")


def _collect_overrides(args: argparse.Namespace) -> dict:
    overrides = {}
    for flag, key in (("n_values", "N"), ("tend", "t_end"), ("dt", "dt"),
                      ("seed", "seed"), ("variant", "variant"), ("out", "out")):
        value = getattr(args, flag)
        if value is not None:
            overrides[key] = value
    for item in args.assignments:
        if "=" not in item:
            raise ConfigError(f"--set needs KEY=VALUE, got {item!r}")
        key, _, value = item.partition("=")
        key = key.strip()
        if key == "experiment":
            raise ConfigError("the experiment is the positional argument, not a --set key")
        overrides[key] = value.strip()
    return overrides


def _load_config_text(path: str | None) -> str | None:
    if path is None:
        return None
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc.strerror}") from exc


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="speclab",
        description="named spectral-solver experiments writing CSV sweeps",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="list registered experiments")
    run_parser = sub.add_parser("run", help="run an experiment sweep")
    _add_run_flags(run_parser)
    emit_parser = sub.add_parser("emit-config", help="print the effective configuration")
    _add_run_flags(emit_parser)

    args = parser.parse_args(argv)

    if args.command == "list":
        width = max(len(name) for name in REGISTRY)
        for name, definition in REGISTRY.items():
            print(f"{name:<{width}}  {definition.description}")
        return 0

    try:
        text = _load_config_text(args.config)
        config = effective_config(args.experiment, text, _collect_overrides(args))
        if args.command == "emit-config":
            sys.stdout.write(emit_config(config))
            return 0
        result = run_experiment(config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(parser.format_usage(), end="", file=sys.stderr)
        return 2

    for member in result.members:
        line = f"N={member.degree}  outcome={member.outcome}"
        if member.error is not None:
            line += f"  error={member.error:.6e}"
        if member.failure_time is not None:
            line += f"  failure_time={member.failure_time:.6f}"
        if member.message:
            line += f"  ({member.message})"
        print(line)
    if result.slope is not None:
        print(f"slope={result.slope:.4f}")
    print(f"wrote {result.manifest_path}")
    return 0 if result.outcome == "completed" else 3


if __name__ == "__main__":
    sys.exit(main())
