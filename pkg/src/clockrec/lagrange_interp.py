"""Cubic Lagrange fractional-delay interpolator, Q2.14 coefficients.

Support points sit at offsets -1, 0, +1, +2 around the current sample;
``mu`` in [0, 1) is measured from offset 0.  A window of ``n + 3`` samples
yields ``n`` outputs, ``y[i]`` landing at ``window`` position ``i + 1 + mu``.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from . import _kernels

COEFF_FRAC_BITS = _kernels.COEFF_FRAC_BITS
COEFF_ONE = 1 << COEFF_FRAC_BITS
MU_FRAC_BITS = 6
OUT_MIN, OUT_MAX = -32, 31


def lagrange_basis_float(mu: float) -> np.ndarray:
    return np.array([
        -mu * (mu - 1) * (mu - 2) / 6,
        (mu + 1) * (mu - 1) * (mu - 2) / 2,
        -(mu + 1) * mu * (mu - 2) / 2,
        (mu + 1) * mu * (mu - 1) / 6,
    ])


@lru_cache(maxsize=1 << MU_FRAC_BITS)
def _basis_codes(mu_code: int) -> tuple[int, int, int, int]:
    c = np.round(lagrange_basis_float(mu_code / (1 << MU_FRAC_BITS)) * COEFF_ONE).astype(np.int64)
    c[1] += COEFF_ONE - c.sum()
    return tuple(int(v) for v in c)


def lagrange_basis(mu_code: int) -> np.ndarray:
    """Q2.14 coefficient codes for ``mu = mu_code / 64``; they always sum to 2**14."""
    if not 0 <= mu_code < (1 << MU_FRAC_BITS):
        raise ValueError(f"mu_code {mu_code} outside [0, 63]")
    return np.array(_basis_codes(mu_code), dtype=np.int64)


def _check_window(window: np.ndarray, expected: int | None) -> np.ndarray:
    window = np.asarray(window)
    if window.ndim != 1 or window.size < 4:
        raise ValueError("window must be a 1-D array of at least 4 samples")
    if expected is not None and window.size != expected:
        raise ValueError(f"window length {window.size} != {expected}")
    return window


def interpolate(window: np.ndarray, mu_code: int, en: int = 0, *, width: int | None = 261) -> np.ndarray | None:
    """Fixed-point interpolation with 6-bit saturated output.

    ``en`` follows the active-low enable: ``en == 1`` means the buffer paused
    this cycle and nothing is produced.
    """
    if en:
        return None
    window = _check_window(window, width)
    return _kernels.lagrange_mac(np.ascontiguousarray(window, dtype=np.int64), lagrange_basis(mu_code), OUT_MIN, OUT_MAX)


def interpolate_raw(window: np.ndarray, mu_code: int, *, quantized: bool = True) -> np.ndarray:
    """Pre-rounding outputs for any window length, no saturation.

    With ``quantized=False`` the exact real-valued basis is used instead of
    the Q2.14 codes.
    """
    window = _check_window(window, None).astype(np.float64)
    if quantized:
        c = lagrange_basis(mu_code).astype(np.float64) / COEFF_ONE
    else:
        c = lagrange_basis_float(mu_code / (1 << MU_FRAC_BITS))
    n = window.size - 3
    return c[0] * window[0:n] + c[1] * window[1:n + 1] + c[2] * window[2:n + 2] + c[3] * window[3:n + 3]
