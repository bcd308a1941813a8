"""Hot inner loops, compiled with numba when available.

Every kernel exists twice: a ``*_numpy`` reference written with array
operations and a ``*_numba`` twin compiled with ``@njit``.  The public
names (``prbs31``, ``resample_sinc``, ``lagrange_mac``) are bound to the
numba version unless numba is missing or ``CLOCKREC_DISABLE_NUMBA`` is set
to a truthy value in the environment before import.  Both paths are
bit-identical for the integer kernels and agree to rounding error for the
floating point resampler.
"""
from __future__ import annotations

import os

import numpy as np

SINC_HALF_TAPS = 8
COEFF_FRAC_BITS = 14

_DISABLE = os.environ.get("CLOCKREC_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _DISABLE:
        raise ImportError("numba disabled by CLOCKREC_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


# ---------------------------------------------------------------------------
# PRBS-31 (x^31 + x^28 + 1): b[n] = b[n-31] ^ b[n-28]
# ---------------------------------------------------------------------------

def prbs31_numpy(state: np.ndarray, n: int) -> np.ndarray:
    out = np.empty(n + 31, dtype=np.uint8)
    out[:31] = state
    # both lags are >= 28, so 28 consecutive bits only depend on older ones
    pos = 31
    while pos < n + 31:
        step = min(28, n + 31 - pos)
        out[pos:pos + step] = out[pos - 31:pos - 31 + step] ^ out[pos - 28:pos - 28 + step]
        pos += step
    return out[31:]


def _prbs31_loop(state, n):
    out = np.empty(n + 31, dtype=np.uint8)
    for i in range(31):
        out[i] = state[i]
    for i in range(31, n + 31):
        out[i] = out[i - 31] ^ out[i - 28]
    return out[31:]


# ---------------------------------------------------------------------------
# Blackman-windowed sinc resampler on a dense grid
# ---------------------------------------------------------------------------

def resample_sinc_numpy(dense: np.ndarray, pos: np.ndarray, chunk: int = 1 << 16) -> np.ndarray:
    """Evaluate ``dense`` at fractional indices ``pos`` (bounds pre-checked)."""
    h = SINC_HALF_TAPS
    offs = np.arange(-h + 1, h + 1)
    out = np.empty(pos.size, dtype=np.float64)
    for start in range(0, pos.size, chunk):
        p = pos[start:start + chunk]
        base = np.floor(p).astype(np.int64)
        frac = p - base
        x = offs[None, :] - frac[:, None]
        win = 0.42 + 0.5 * np.cos(np.pi * x / h) + 0.08 * np.cos(2.0 * np.pi * x / h)
        w = np.sinc(x) * win
        out[start:start + chunk] = np.sum(dense[base[:, None] + offs[None, :]] * w, axis=1)
    return out


def _resample_sinc_loop(dense, pos):
    h = SINC_HALF_TAPS
    out = np.empty(pos.size, dtype=np.float64)
    for k in range(pos.size):
        p = pos[k]
        base = int(np.floor(p))
        frac = p - base
        acc = 0.0
        for j in range(-h + 1, h + 1):
            x = j - frac
            if x == 0.0:
                s = 1.0
            else:
                s = np.sin(np.pi * x) / (np.pi * x)
            win = 0.42 + 0.5 * np.cos(np.pi * x / h) + 0.08 * np.cos(2.0 * np.pi * x / h)
            acc += dense[base + j] * s * win
        out[k] = acc
    return out


# ---------------------------------------------------------------------------
# 4-tap fixed-point MAC, round half away from zero, saturate
# ---------------------------------------------------------------------------

def lagrange_mac_numpy(window: np.ndarray, coeffs: np.ndarray, lo: int, hi: int) -> np.ndarray:
    n = window.size - 3
    w = window.astype(np.int64)
    acc = (coeffs[0] * w[0:n] + coeffs[1] * w[1:n + 1]
           + coeffs[2] * w[2:n + 2] + coeffs[3] * w[3:n + 3])
    half = np.int64(1) << (COEFF_FRAC_BITS - 1)
    mag = (np.abs(acc) + half) >> COEFF_FRAC_BITS
    return np.clip(np.where(acc < 0, -mag, mag), lo, hi)


def _lagrange_mac_loop(window, coeffs, lo, hi):
    n = window.size - 3
    out = np.empty(n, dtype=np.int64)
    half = 1 << (COEFF_FRAC_BITS - 1)
    for i in range(n):
        acc = (coeffs[0] * np.int64(window[i]) + coeffs[1] * np.int64(window[i + 1])
               + coeffs[2] * np.int64(window[i + 2]) + coeffs[3] * np.int64(window[i + 3]))
        if acc < 0:
            q = -((-acc + half) >> COEFF_FRAC_BITS)
        else:
            q = (acc + half) >> COEFF_FRAC_BITS
        if q < lo:
            q = lo
        elif q > hi:
            q = hi
        out[i] = q
    return out


if HAVE_NUMBA:
    prbs31_numba = njit(cache=True)(_prbs31_loop)
    resample_sinc_numba = njit(cache=True)(_resample_sinc_loop)
    lagrange_mac_numba = njit(cache=True)(_lagrange_mac_loop)

    prbs31 = prbs31_numba
    resample_sinc = resample_sinc_numba
    lagrange_mac = lagrange_mac_numba
else:
    prbs31_numba = resample_sinc_numba = lagrange_mac_numba = None

    prbs31 = prbs31_numpy
    resample_sinc = resample_sinc_numpy
    lagrange_mac = lagrange_mac_numpy

BACKEND = "numba" if HAVE_NUMBA else "numpy"
