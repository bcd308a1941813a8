"""Command line entry point: ``clockrec run`` and ``clockrec sweep``."""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys

import numpy as np

from .experiment import ExperimentConfig, PIPELINE_FAULTS, run_experiment, sweep_cfo


def _load_config(path: str | None) -> ExperimentConfig:
    if not path:
        return ExperimentConfig()
    with open(path) as fh:
        return ExperimentConfig.from_dict(json.load(fh))


def _override(cfg: ExperimentConfig, args) -> ExperimentConfig:
    stim = {}
    if args.symbols is not None:
        stim["n_symbols"] = args.symbols
    if args.snr_db is not None:
        stim["snr_db"] = args.snr_db
    if args.seed is not None:
        stim["seed"] = args.seed
    if stim:
        cfg = dataclasses.replace(cfg, stimulus=dataclasses.replace(cfg.stimulus, **stim))
    if args.data_delay is not None:
        cfg = dataclasses.replace(cfg, pipeline=dataclasses.replace(cfg.pipeline, data_delay_cycles=args.data_delay))
    return cfg


def _sweep_values(args, cfg: ExperimentConfig) -> tuple[float, ...]:
    if args.list:
        return tuple(float(v) for v in args.list.split(","))
    if args.start is not None or args.stop is not None:
        if args.start is None or args.stop is None:
            raise SystemExit("--from and --to must be given together")
        n = int(round((args.stop - args.start) / args.step)) + 1
        if n < 1:
            raise SystemExit("empty sweep range")
        return tuple(float(v) for v in np.round(args.start + args.step * np.arange(n), 9))
    return cfg.sweep


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="clockrec", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment configuration")
    common.add_argument("--symbols", type=int, help="number of received symbols")
    common.add_argument("--snr-db", type=float, help="AWGN SNR in dB (default: noiseless)")
    common.add_argument("--seed", type=int)
    common.add_argument("--data-delay", type=int, help="data path delay in cycles")

    run = sub.add_parser("run", parents=[common], help="simulate one CFO point")
    run.add_argument("--cfo-ppm", type=float, default=0.0)
    run.add_argument("--trace-out", help="per-cycle trace CSV")
    run.add_argument("--json-out", help="JSON result record")

    sweep = sub.add_parser("sweep", parents=[common], help="simulate a list or range of CFO points")
    sweep.add_argument("--from", dest="start", type=float)
    sweep.add_argument("--to", dest="stop", type=float)
    sweep.add_argument("--step", type=float, default=10.0)
    sweep.add_argument("--list", help="comma-separated CFO values in ppm")
    sweep.add_argument("--workers", type=int)
    sweep.add_argument("--csv-out", help="sweep results CSV")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    cfg = _override(_load_config(args.config), args)

    if args.command == "run":
        try:
            res = run_experiment(cfg, args.cfo_ppm, trace_path=args.trace_out, json_path=args.json_out)
        except PIPELINE_FAULTS as exc:
            print(f"pipeline fault: {exc}", file=sys.stderr)
            return 1
        print(json.dumps(res.record()))
        return 0

    cfg = dataclasses.replace(cfg, sweep=_sweep_values(args, cfg),
                              workers=args.workers or cfg.workers,
                              csv_out=args.csv_out or cfg.csv_out)
    rows = sweep_cfo(cfg)
    for row in rows:
        sndr = "" if row["sndr_db"] is None else f"{row['sndr_db']:6.2f} dB"
        print(f"{row['cfo_ppm']:+8.1f} ppm  ber={row['ber']:.3g}  sndr={sndr}  pauses={row['pause_count']}  {row['status']}")
    return 0 if all(not str(r["status"]).startswith("fault") for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
