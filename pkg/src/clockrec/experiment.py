"""Single-point runs and CFO sweeps: stimulus -> pipeline -> metrics, with CSV/JSON output."""
from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .elastic_buffer import BufferOverflowError, EbConfig, IntegerDelaySlewError
from .metrics import (BerReport, SndrReport, align_and_count, compute_sndr, decide_symbols,
                      mean_pause_interval, pause_cycles, WARMUP_GUARD)
from .pipeline import TRACE_COLUMNS, Pipeline, PipelineConfig
from .stimulus import StimulusConfig, make_blocks

log = logging.getLogger(__name__)

SWEEP_COLUMNS = ("cfo_ppm", "cfo_mhz", "ber", "log10_ber", "sndr_db", "pause_count",
                 "mean_pause_interval", "status")
PIPELINE_FAULTS = (BufferOverflowError, IntegerDelaySlewError)


@dataclass(frozen=True)
class ExperimentConfig:
    stimulus: StimulusConfig = field(default_factory=StimulusConfig)
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    sweep: tuple[float, ...] = (0.0,)
    independent_seeds: bool = False
    workers: int = 1
    trace_out: str | None = None
    json_out: str | None = None
    csv_out: str | None = None

    def __post_init__(self):
        if not self.sweep:
            raise ValueError("sweep list must not be empty")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        stim = StimulusConfig(**data.pop("stimulus", {}))
        pipe = dict(data.pop("pipeline", {}))
        eb = EbConfig(**pipe.pop("eb", {}))
        sweep = tuple(float(v) for v in data.pop("sweep", (0.0,)))
        return cls(stimulus=stim, pipeline=PipelineConfig(eb=eb, **pipe), sweep=sweep, **data)

    def digest(self, cfo_ppm: float) -> str:
        body = self.to_dict()
        for key in ("trace_out", "json_out", "csv_out", "workers", "sweep"):
            body.pop(key)
        body["stimulus"]["cfo_ppm"] = float(cfo_ppm)
        return hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()[:16]


@dataclass
class RunResult:
    cfo_ppm: float
    status: str
    ber: BerReport | None
    sndr: SndrReport | None
    pause_count: int
    mean_pause_interval: float | None
    config_digest: str
    trace: np.ndarray = field(repr=False)
    n_cycles: int = 0

    @property
    def tracking_failed(self) -> bool:
        return self.ber is None or self.ber.alignment_failed

    @property
    def ber_value(self) -> float:
        return 0.5 if self.ber is None else self.ber.ber

    def record(self) -> dict:
        return {
            "cfo_ppm": self.cfo_ppm,
            "ber": self.ber_value,
            "errors": None if self.ber is None else self.ber.errors,
            "symbols": 0 if self.ber is None else self.ber.symbols_counted,
            "sndr_db": None if self.sndr is None else self.sndr.sndr_db,
            "pause_count": self.pause_count,
            "config_digest": self.config_digest,
            "status": self.status,
            "alignment_failed": self.tracking_failed,
            "mean_pause_interval": self.mean_pause_interval,
        }


def write_trace_csv(path, trace: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        w.writerows(trace.tolist())


def write_json(path, record: dict) -> None:
    Path(path).write_text(json.dumps(record, indent=2) + "\n")


def run_experiment(config: ExperimentConfig, cfo_ppm: float, seed: int | None = None,
                   trace_path=None, json_path=None) -> RunResult:
    """Run one CFO point. Pipeline faults propagate; tracking failures are reported."""
    stim = dataclasses.replace(config.stimulus, cfo_ppm=float(cfo_ppm),
                               seed=config.stimulus.seed if seed is None else seed)
    run = make_blocks(stim)
    pipe = Pipeline(dataclasses.replace(config.pipeline, telemetry=True))
    out = pipe.run(run.blocks)
    trace = pipe.trace_array()

    ber = sndr = None
    status = "ok"
    try:
        decisions = decide_symbols(out)
        ber = align_and_count(decisions.bits, run.bits)
        sndr = compute_sndr(decisions.samples, run.bits, ber.alignment_lag, WARMUP_GUARD)
        if ber.alignment_failed:
            status = "alignment_failed"
    except ValueError as exc:
        log.warning("cfo %+g ppm: metrics unavailable (%s)", cfo_ppm, exc)
        status = "no_eye"

    pauses = pause_cycles(trace)
    result = RunResult(float(cfo_ppm), status, ber, sndr, int(pauses.size), mean_pause_interval(pauses),
                       config.digest(cfo_ppm), trace, n_cycles=len(trace))
    trace_path = trace_path or config.trace_out
    json_path = json_path or config.json_out
    if trace_path:
        write_trace_csv(trace_path, trace)
    if json_path:
        write_json(json_path, result.record())
    return result


def sweep_row(result: RunResult, symbol_rate: float) -> dict:
    ber = result.ber_value
    return {
        "cfo_ppm": result.cfo_ppm,
        "cfo_mhz": result.cfo_ppm * symbol_rate * 1e-6 / 1e6,
        "ber": ber,
        "log10_ber": result.ber.log10_ber_or_floor if result.ber else math.log10(0.5),
        "sndr_db": None if result.sndr is None else result.sndr.sndr_db,
        "pause_count": result.pause_count,
        "mean_pause_interval": result.mean_pause_interval,
        "status": result.status,
    }


def _sweep_point(args) -> tuple[dict, RunResult | None]:
    config, cfo, seed = args
    try:
        res = run_experiment(config, cfo, seed=seed)
        return sweep_row(res, config.stimulus.symbol_rate), res
    except PIPELINE_FAULTS as exc:
        row = dict.fromkeys(SWEEP_COLUMNS)
        row.update(cfo_ppm=float(cfo), cfo_mhz=cfo * config.stimulus.symbol_rate * 1e-12,
                   ber=0.5, log10_ber=math.log10(0.5), status=f"fault: {exc}")
        return row, None


def sweep_cfo(config: ExperimentConfig, csv_path=None, keep_results: bool = False):
    """One independent run per CFO value; returns rows (and results when ``keep_results``)."""
    jobs = [(config, cfo, config.stimulus.seed + i if config.independent_seeds else None)
            for i, cfo in enumerate(config.sweep)]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(pool.map(_sweep_point, jobs))
    else:
        outcomes = [_sweep_point(job) for job in jobs]
    rows = [row for row, _ in outcomes]
    csv_path = csv_path or config.csv_out
    if csv_path:
        write_sweep_csv(csv_path, rows)
    if keep_results:
        return rows, [res for _, res in outcomes]
    return rows


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_sweep_csv(path, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for row in rows:
            w.writerow([_fmt(row[c]) for c in SWEEP_COLUMNS])
