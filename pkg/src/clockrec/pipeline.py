"""Cycle-accurate wiring of estimator, unwrap, elastic buffer and interpolator.

One call to :meth:`Pipeline.clock_cycle` is one DSP clock: every block
advances exactly once.  Per cycle:

1. the estimator consumes the input block and emits a 7-bit tau;
2. the unwrapper accumulates it into phi and splits (m, mu);
3. the input block enters the data delay line and the block leaving it is
   written to the elastic buffer;
4. the buffer is read with m;
5. the interpolator consumes the buffer output registered last cycle
   together with the equally delayed mu.

Step 5 mirrors the one-cycle register between the buffer and the
interpolator, so a window and the mu used to correct it always come from
the same cycle.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .elastic_buffer import EbConfig, ElasticBuffer
from .lagrange_interp import interpolate
from .phase_unwrap import PhaseUnwrapper
from .timing_estimator import MA_CYCLES, TimingEstimator

BLOCK_SIZE = 256


@dataclass(frozen=True)
class PipelineConfig:
    block_size: int = BLOCK_SIZE
    ma_cycles: int = MA_CYCLES
    data_delay_cycles: int = 8
    eb: EbConfig = field(default_factory=EbConfig)
    epsilon_power: float | None = None
    telemetry: bool = True

    def __post_init__(self):
        if self.block_size != BLOCK_SIZE:
            raise ValueError(f"block_size must be {BLOCK_SIZE}")
        if self.ma_cycles < 1:
            raise ValueError("ma_cycles must be >= 1")
        if self.data_delay_cycles < 0:
            raise ValueError("data_delay_cycles must be >= 0")
        if self.eb.write_width != self.block_size:
            raise ValueError("elastic buffer write width must equal block_size")


class CycleTrace(NamedTuple):
    cycle: int
    tau_code: int
    phi_code: int
    m: int
    mu_code: int
    en: int
    fill: int


TRACE_COLUMNS = CycleTrace._fields


class Pipeline:
    def __init__(self, config: PipelineConfig | None = None):
        self.config = config or PipelineConfig()
        cfg = self.config
        self.estimator = TimingEstimator(cfg.ma_cycles, cfg.epsilon_power)
        self.unwrapper = PhaseUnwrapper()
        self.buffer = ElasticBuffer(cfg.eb)
        self.reset()

    def reset(self) -> None:
        self.estimator.reset()
        self.unwrapper.reset()
        self.buffer.reset()
        self.delay_line: deque[np.ndarray] = deque()
        self.window_reg: np.ndarray | None = None
        self.mu_reg = 0
        self.cycle = 0
        self.trace: list[CycleTrace] = []

    def clock_cycle(self, block: np.ndarray) -> tuple[np.ndarray | None, CycleTrace]:
        cfg = self.config
        block = np.asarray(block)
        if block.shape != (cfg.block_size,):
            raise ValueError(f"expected a block of {cfg.block_size} samples, got shape {block.shape}")

        tau = self.estimator.step(block)
        split = self.unwrapper.step(tau)

        self.delay_line.append(block)
        if len(self.delay_line) > cfg.data_delay_cycles:
            self.buffer.write(self.delay_line.popleft())

        window, en = self.buffer.read(split.m)

        out = None
        if self.window_reg is not None:
            out = interpolate(self.window_reg, self.mu_reg, width=cfg.eb.read_width)
        self.window_reg = window
        self.mu_reg = split.mu_code

        rec = CycleTrace(self.cycle, tau, self.unwrapper.phi_code, split.m, split.mu_code, en, self.buffer.fill)
        if cfg.telemetry:
            self.trace.append(rec)
        self.cycle += 1
        return out, rec

    def run(self, blocks) -> np.ndarray:
        """Clock every block through and return the concatenated corrected samples."""
        outputs = []
        for block in blocks:
            out, _ = self.clock_cycle(block)
            if out is not None:
                outputs.append(out)
        if not outputs:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate(outputs)

    def trace_array(self) -> np.ndarray:
        """Trace as an ``(n_cycles, 7)`` int64 array in :data:`TRACE_COLUMNS` order."""
        if not self.trace:
            return np.zeros((0, len(TRACE_COLUMNS)), dtype=np.int64)
        return np.array(self.trace, dtype=np.int64)
