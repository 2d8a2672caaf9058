"""Command-line front end: dataset generation, single solves, experiments.

Usage:
    kernelop generate   --config cfg.json [--out DIR]
    kernelop solve      --config cfg.json [--out DIR]
    kernelop experiment --config cfg.json [--jobs N] [--out DIR]

The JSON config mirrors the ExperimentConfig field names. Exit codes:
0 success, 2 configuration error, 1 runtime error.
"""

from __future__ import annotations

import argparse
import sys


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kernelop",
        description="Learn convolution kernels in operators from noisy data.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("generate", "write dataset files"),
                        ("solve", "run one estimator and dump its kernel"),
                        ("experiment", "run an experiment family")):
        cmd = sub.add_parser(name, help=help_)
        cmd.add_argument("--config", required=True,
                         help="JSON file mirroring ExperimentConfig fields")
        cmd.add_argument("--out", default=None,
                         help="output directory (overrides config out_dir)")
        if name == "experiment":
            cmd.add_argument("--jobs", type=int, default=1,
                             help="worker processes for simulations")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    from .experiments import (ConfigError, ExperimentConfig,
                              generate_datasets, run_experiment)
    try:
        cfg = ExperimentConfig.from_json(args.config)
        if args.out is not None:
            cfg.out_dir = args.out
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        if args.command == "generate":
            paths = generate_datasets(cfg)
            print(f"wrote {len(paths)} dataset files to {cfg.out_dir}")
        elif args.command == "solve":
            cfg.experiment = "single_solve"
            rows = run_experiment(cfg)
            row = rows[0]
            print(f"{row.example}/{row.norm}/{row.solver}: "
                  f"rel_error={row.rel_error:.4g} time={row.time_s:.3g}s "
                  f"-> {cfg.out_dir}")
        else:
            rows = run_experiment(cfg, jobs=args.jobs)
            print(f"{cfg.experiment}: {len(rows)} rows -> {cfg.out_dir}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - surfaced with context
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
