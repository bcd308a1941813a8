"""Overclocked elastic buffer.

Each cycle ``write_width`` samples are appended and, once started, a window
of ``read_width`` samples is read whose start advances by
``out_width + dm`` where ``dm`` is the change of the integer delay since
the last read.  Because ``out_width - slew_limit >= write_width`` the buffer
drains on every active cycle and cannot overflow; it underflows instead,
which costs one paused cycle (``en == 1``) without losing or repeating data.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .phase_unwrap import INT_BITS, wrap_signed


class BufferOverflowError(RuntimeError):
    """A write would clobber samples the reader still needs."""


class IntegerDelaySlewError(RuntimeError):
    """The integer delay jumped by more than the slew limit in one read."""


@dataclass(frozen=True)
class EbConfig:
    write_width: int = 256
    read_width: int = 261
    out_width: int = 258
    capacity: int = 1024
    start_fill: int = 512
    slew_limit: int = 2
    min_headroom: int = 64

    def __post_init__(self):
        if self.read_width != self.out_width + 3:
            raise ValueError("read_width must equal out_width + 3 (interpolator memory)")
        if self.out_width <= self.write_width:
            raise ValueError("out_width must exceed write_width (overclocked read)")
        if self.slew_limit < 1:
            raise ValueError("slew_limit must be >= 1")
        if not self.capacity >= self.start_fill >= self.read_width + self.min_headroom:
            raise ValueError("need capacity >= start_fill >= read_width + min_headroom")
        if self.capacity < self.start_fill + self.write_width:
            raise ValueError("capacity too small for one write on top of start_fill")


class ElasticBuffer:
    """Ring buffer addressed by absolute sample index."""

    def __init__(self, config: EbConfig | None = None, dtype=np.int64):
        self.config = config or EbConfig()
        self.storage = np.zeros(self.config.capacity, dtype=dtype)
        self.reset()

    def reset(self) -> None:
        self.storage[:] = 0
        self.total_written = 0
        self.read_position = 0
        self.last_m = 0
        self.started = False
        self.paused_last_cycle = False

    @property
    def fill(self) -> int:
        return self.total_written - self.read_position

    def write(self, block: np.ndarray) -> None:
        cfg = self.config
        block = np.asarray(block)
        n = block.size
        # a negative integer-delay step may reach back slew_limit samples
        protected = max(self.read_position - cfg.slew_limit, 0)
        if self.total_written + n - protected > cfg.capacity:
            raise BufferOverflowError(
                f"buffer overflow: fill {self.fill} + write {n} exceeds capacity {cfg.capacity}")
        idx = (self.total_written + np.arange(n)) % cfg.capacity
        self.storage[idx] = block
        self.total_written += n

    def read(self, m: int) -> tuple[np.ndarray | None, int]:
        """Return ``(window, en)``; ``window`` is None whenever ``en == 1``."""
        cfg = self.config
        if not self.started:
            if self.fill < cfg.start_fill:
                self.paused_last_cycle = True
                return None, 1
            self.started = True
            self.last_m = m
        dm = wrap_signed(m - self.last_m, INT_BITS)
        if abs(dm) > cfg.slew_limit:
            raise IntegerDelaySlewError(
                f"integer delay slew exceeded: dm={dm} (limit {cfg.slew_limit})")
        start = self.read_position + dm
        if self.total_written - start < cfg.read_width:
            self.paused_last_cycle = True
            return None, 1
        idx = (start + np.arange(cfg.read_width)) % cfg.capacity
        window = self.storage[idx]
        self.read_position = start + cfg.out_width
        self.last_m = m
        self.paused_last_cycle = False
        return window, 0
