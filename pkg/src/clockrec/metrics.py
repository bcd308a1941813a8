"""Symbol decisions, BER against the transmitted sequence, fit-based SNDR."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import signal

WARMUP_GUARD = 512
MAX_LAG = 2048
MIN_AGREEMENT = 0.9
ERROR_FREE_LOG10 = -7.0  # plotted as "-inf" on a log10(BER) axis
SNDR_CAP_DB = 60.0


@dataclass(frozen=True)
class SymbolDecisions:
    bits: np.ndarray
    samples: np.ndarray
    parity: int
    threshold: float


@dataclass(frozen=True)
class BerReport:
    """Error count over the aligned overlap.

    When alignment fails ``ber`` is reported as 0.5 regardless of
    ``errors``, which then holds the count at the best lag.
    """

    errors: int
    symbols_counted: int
    ber: float
    alignment_lag: int
    log10_ber_or_floor: float
    alignment_failed: bool = False
    agreement: float = 1.0


@dataclass(frozen=True)
class SndrReport:
    sndr_db: float
    gain: float
    offset: float


def _eye_opening(s: np.ndarray) -> float:
    lo, hi = np.percentile(s, [10, 90])
    thr = 0.5 * (lo + hi)
    upper, lower = s[s > thr], s[s <= thr]
    if upper.size == 0 or lower.size == 0 or hi == lo:
        return -math.inf
    return float((upper.mean() - lower.mean()) / (upper.std() + lower.std() + 1e-12))


def decide_symbols(samples: np.ndarray) -> SymbolDecisions:
    """Pick the sample parity with the widest eye, then slice at the 10/90 percentile midpoint."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size < 4 or np.ptp(samples) == 0:
        raise ValueError("no eye: constant or empty sample stream")
    openings = [_eye_opening(samples[p::2]) for p in (0, 1)]
    if max(openings) == -math.inf:
        raise ValueError("no eye: neither sample parity shows two levels")
    parity = int(np.argmax(openings))
    chosen = samples[parity::2]
    lo, hi = np.percentile(chosen, [10, 90])
    thr = float(0.5 * (lo + hi))
    return SymbolDecisions((chosen > thr).astype(np.uint8), chosen, parity, thr)


def _agreement_by_lag(bits: np.ndarray, ref: np.ndarray, max_lag: int):
    d = 2.0 * bits - 1.0
    r = 2.0 * ref - 1.0
    # z[k] = sum_i r[i + lag] * d[i] with lag = k - (len(d) - 1)
    z = signal.correlate(r, d, mode="full", method="fft")
    lags = np.arange(-max_lag, max_lag + 1)
    k = lags + d.size - 1
    valid = (k >= 0) & (k < z.size)
    lags, k = lags[valid], k[valid]
    overlap = np.minimum(d.size, r.size - lags) - np.maximum(0, -lags)
    ok = overlap > 0
    lags, k, overlap = lags[ok], k[ok], overlap[ok]
    agree = (overlap + np.rint(z[k])) / (2.0 * overlap)
    return lags, agree


def align_and_count(bits: np.ndarray, ref: np.ndarray, guard: int = WARMUP_GUARD,
                    max_lag: int = MAX_LAG, min_agreement: float = MIN_AGREEMENT) -> BerReport:
    """Find ``lag`` maximising agreement of ``bits[i]`` with ``ref[i + lag]`` and count errors."""
    bits = np.asarray(bits, dtype=np.int64)
    ref = np.asarray(ref, dtype=np.int64)
    if bits.size < 4096:
        raise ValueError(f"need at least 4096 decided bits, got {bits.size}")
    lags, agree = _agreement_by_lag(bits, ref, max_lag)
    best = int(np.argmax(agree))
    lag = int(lags[best])
    start = max(guard, -lag)
    stop = min(bits.size, ref.size - lag)
    if stop <= start:
        raise ValueError("no overlap left after the warmup guard")
    errors = int(np.count_nonzero(bits[start:stop] != ref[start + lag:stop + lag]))
    counted = stop - start
    failed = bool(agree[best] < min_agreement)
    ber = 0.5 if failed else errors / counted
    log10_ber = math.log10(ber) if ber > 0 else ERROR_FREE_LOG10
    return BerReport(errors, counted, ber, lag, log10_ber, failed, float(agree[best]))


def compute_sndr(symbol_samples: np.ndarray, ref_bits: np.ndarray, lag: int = 0, guard: int = 0) -> SndrReport:
    """Fit ``y ~ g * s + o`` over the aligned window; SNDR is fitted-signal variance over residual power."""
    y = np.asarray(symbol_samples, dtype=np.float64)
    ref = np.asarray(ref_bits, dtype=np.float64)
    start = max(guard, -lag)
    stop = min(y.size, ref.size - lag)
    if stop - start < 2:
        raise ValueError("aligned window too short")
    y = y[start:stop]
    s = ref[start + lag:stop + lag]
    if np.ptp(s) == 0:
        raise ValueError("degenerate fit: reference is constant")
    design = np.column_stack([s, np.ones_like(s)])
    (g, o), *_ = np.linalg.lstsq(design, y, rcond=None)
    fit = g * s + o
    p_sig = float(np.sum((fit - fit.mean()) ** 2))
    p_err = float(np.sum((y - fit) ** 2))
    if p_sig <= 1e-12 * max(1.0, float(np.sum(y * y))):
        raise ValueError("degenerate fit: no signal component")
    if p_err == 0.0 or p_sig / p_err >= 10 ** (SNDR_CAP_DB / 10):
        return SndrReport(SNDR_CAP_DB, float(g), float(o))
    return SndrReport(10.0 * math.log10(p_sig / p_err), float(g), float(o))


def pause_cycles(trace: np.ndarray) -> np.ndarray:
    """Cycle indices of underflow pauses (``en == 1`` after the buffer first delivered)."""
    cycles, en = trace[:, 0], trace[:, 5]
    active = np.flatnonzero(en == 0)
    if active.size == 0:
        return np.zeros(0, dtype=np.int64)
    after = cycles > cycles[active[0]]
    return cycles[after & (en == 1)]


def mean_pause_interval(pauses: np.ndarray) -> float | None:
    if pauses.size < 2:
        return None
    return float(np.mean(np.diff(pauses)))
