"""Command-line surface: config-driven experiment runs.

Exit codes: 0 success, 1 runtime failure, 2 config error.  Partially written
outputs are removed on failure so a nonzero exit never leaves stale files.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, format_config, load_config
from .experiments import DRIVERS, disorder_experiment

SUBCOMMAND_EXPERIMENTS = {
    "run": ("p1", "p2", "effective"),
    "scan-b": ("scan_b",),
    "disorder": ("disorder",),
    "dephasing": ("dephasing",),
    "nonmarkovian": ("nonmarkovian",),
    "demo-measures": ("measures-demo",),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xxchains",
        description="Spin-chain entanglement protocol experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in list(SUBCOMMAND_EXPERIMENTS) + ["validate-config"]:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="key=value config file")
        p.add_argument("--out-dir", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads for independent realizations")
        p.add_argument("overrides", nargs="*", metavar="key=value",
                       help="config overrides")
    return parser


def cli_main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        overrides = list(args.overrides)
        if args.seed is not None:
            overrides.append(f"seed={args.seed}")
        config = load_config(args.config, overrides)
        if args.command == "validate-config":
            return 0
        allowed = SUBCOMMAND_EXPERIMENTS[args.command]
        if config.experiment not in allowed:
            raise ConfigError(
                f"subcommand {args.command!r} expects experiment in {allowed}, "
                f"config says {config.experiment!r}")
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    try:
        driver = DRIVERS[config.experiment]
        echo = format_config(config)
        if driver is disorder_experiment:
            written = driver(config, out_dir, echo, n_workers=max(1, args.threads))
        else:
            written = driver(config, out_dir, echo)
    except Exception as exc:  # noqa: BLE001 - single CLI failure boundary
        for path in written:
            Path(path).unlink(missing_ok=True)
        for leftover in (out_dir / f"{config['output.prefix']}.csv",
                         out_dir / f"{config['output.prefix']}.manifest.json"):
            leftover.unlink(missing_ok=True)
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


def main() -> None:
    sys.exit(cli_main())
