"""Feedforward timing phase estimation at 2 samples/symbol.

One block of N samples gives the symbol-rate spectral correlation

    C = sum_{k=0}^{N/2-1} conj(X[k]) * X[k + N/2]

whose angle is ``pi * tau`` for a signal delayed by ``tau`` sample periods.
Only the lower half of the spectrum is summed: the upper half contributes
the complex conjugate, so the full-spectrum sum is purely real.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TAU_FRAC_BITS = 6
TAU_SCALE = 1 << TAU_FRAC_BITS  # codes per sample period
TAU_MIN, TAU_MAX = -64, 63
MA_CYCLES = 16


def spectral_correlation(block: np.ndarray) -> complex:
    x = np.asarray(block, dtype=np.float64)
    n = x.size
    if n % 2:
        raise ValueError("block length must be even")
    spec = np.fft.fft(x)
    half = n // 2
    return complex(np.dot(np.conj(spec[:half]), spec[half:]))


def default_epsilon_power(block_size: int = 256, adc_bits: int = 6) -> float:
    """1e-12 of the largest correlation magnitude a full-scale block can produce."""
    full = float(1 << (adc_bits - 1))
    return 1e-12 * (block_size * block_size * full * full)


@dataclass
class MaState:
    """Boxcar over the last ``length`` complex correlations."""

    length: int = MA_CYCLES
    ring: np.ndarray = field(default=None, repr=False)
    total: complex = 0j
    index: int = 0

    def __post_init__(self):
        if self.ring is None:
            self.ring = np.zeros(self.length, dtype=np.complex128)

    def reset(self) -> None:
        self.ring[:] = 0
        self.total = 0j
        self.index = 0


def ma_update(state: MaState, c: complex) -> complex:
    """Push ``c`` into the ring and return the mean of the last ``length`` entries.

    The running sum is kept exactly equal to the ring contents by recomputing
    it from the ring, so float drift cannot accumulate over long runs.
    """
    state.ring[state.index] = c
    state.index = (state.index + 1) % state.length
    state.total = complex(state.ring.sum())
    return state.total / state.length


def quantize_tau(tau: float) -> int:
    code = math.floor(tau * TAU_SCALE + 0.5)
    if code > TAU_MAX:
        code -= 2 * TAU_SCALE
    return code


def estimate_tau(c_smoothed: complex, prev_code: int, epsilon_power: float = 0.0) -> int:
    """Angle of the smoothed correlation as a signed Q1.6 code; holds ``prev_code`` when degenerate."""
    if abs(c_smoothed) < epsilon_power or c_smoothed == 0:
        return prev_code
    return quantize_tau(math.atan2(c_smoothed.imag, c_smoothed.real) / math.pi)


class TimingEstimator:
    """Per-cycle estimator: correlation, 16-cycle complex moving average, 7-bit angle."""

    def __init__(self, ma_cycles: int = MA_CYCLES, epsilon_power: float | None = None):
        self.ma = MaState(ma_cycles)
        self.epsilon_power = default_epsilon_power() if epsilon_power is None else epsilon_power
        self.tau_code = 0

    def reset(self) -> None:
        self.ma.reset()
        self.tau_code = 0

    def step(self, block: np.ndarray) -> int:
        smoothed = ma_update(self.ma, spectral_correlation(block))
        self.tau_code = estimate_tau(smoothed, self.tau_code, self.epsilon_power)
        return self.tau_code
