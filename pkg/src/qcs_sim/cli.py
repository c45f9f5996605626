"""Command line interface.

    qcs-sim <subcommand> --config <path> --out <dir> [--seed S] [--trials N]
                         [--sweep-param NAME --sweep-values V1,V2,...]

Subcommands: qcs, beat, syntonize, esct, compare, sweep. The sweep subcommand
additionally takes --protocol to choose what runs at each grid point; sweep
flags on a protocol subcommand are an equivalent spelling. --seed/--trials
override the values stored in the config file.

Exit codes: 0 success, 2 configuration/validation error, 3 runtime error.
"""
from __future__ import annotations

import argparse
import sys

from .config import load_config
from .errors import ConfigError
from .harness import SUBCOMMANDS, run_experiment


def _parse_values(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise ConfigError(f"--sweep-values must be comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcs-sim",
        description="Monte Carlo simulator of entanglement-based clock "
        "synchronization and its slow-clock-transport baseline",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", required=True, help="scenario JSON file")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="u64 seed (overrides config)")
        p.add_argument("--trials", type=int, default=None, help="trial count (overrides config)")
        p.add_argument("--sweep-param", default=None, help="parameter path to sweep")
        p.add_argument("--sweep-values", default=None, help="comma-separated grid values")
        if name == "sweep":
            p.add_argument(
                "--protocol", default=None,
                choices=("qcs", "beat", "syntonize", "esct", "compare"),
                help="protocol to run at each grid point",
            )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        values = _parse_values(args.sweep_values) if args.sweep_values else None
        summary = run_experiment(
            args.subcommand,
            cfg,
            args.out,
            seed=args.seed,
            trials=args.trials,
            protocol=getattr(args, "protocol", None),
            sweep_param=args.sweep_param,
            sweep_values=values,
        )
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # pragma: no cover - defensive
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    if "ratio" in summary and summary.get("ratio") is not None:
        print(
            f"rms_qcs={summary['rms_qcs']:.6e} rms_esct={summary['rms_esct']:.6e} "
            f"ratio={summary['ratio']:.4f}"
        )
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
