"""Edge-detector phase unwrap and Q10.6 accumulator.

All arithmetic is on integer codes of 1/64 sample period.  The wrapped
estimate spans one symbol (2 sample periods = 128 codes); the accumulator
is a 16-bit two's-complement register that wraps modulo 1024 samples.
"""
from __future__ import annotations

from typing import NamedTuple

FRAC_BITS = 6
WRAP_CODES = 2 << FRAC_BITS  # one symbol = 2 samples
HALF_WRAP = WRAP_CODES // 2
PHI_BITS = 16
INT_BITS = PHI_BITS - FRAC_BITS


def wrap_signed(value: int, bits: int) -> int:
    """Reduce ``value`` into the ``bits``-wide two's-complement range."""
    half = 1 << (bits - 1)
    return ((value + half) & ((1 << bits) - 1)) - half


class DelaySplit(NamedTuple):
    m: int
    mu_code: int

    @property
    def mu(self) -> float:
        return self.mu_code / (1 << FRAC_BITS)


def unwrap_step(tau_now: int, tau_prev: int) -> int:
    delta = tau_now - tau_prev
    if delta > HALF_WRAP:
        return delta - WRAP_CODES
    if delta < -HALF_WRAP:
        return delta + WRAP_CODES
    return delta


def accumulate(phi_code: int, delta_code: int) -> int:
    return wrap_signed(phi_code + delta_code, PHI_BITS)


def split_phase(phi_code: int) -> DelaySplit:
    m = wrap_signed(phi_code >> FRAC_BITS, INT_BITS)
    return DelaySplit(m, phi_code & ((1 << FRAC_BITS) - 1))


class PhaseUnwrapper:
    def __init__(self):
        self.tau_prev = 0
        self.phi_code = 0

    def reset(self) -> None:
        self.tau_prev = 0
        self.phi_code = 0

    def step(self, tau_code: int) -> DelaySplit:
        self.phi_code = accumulate(self.phi_code, unwrap_step(tau_code, self.tau_prev))
        self.tau_prev = tau_code
        return split_phase(self.phi_code)
