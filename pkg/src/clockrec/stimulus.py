"""Received-waveform synthesis: PRBS bits, RC-shaped OOK, detuned sampling, 6-bit ADC."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels

BLOCK_SIZE = 256
PULSE_SPAN_SYMBOLS = 16


@dataclass(frozen=True)
class StimulusConfig:
    """Parameters of one received waveform.

    ``cfo_ppm`` is the offset of the receiver sampling clock relative to
    nominal; positive means the receiver samples faster, so the timing phase
    of the received symbols drifts towards later sample indices.
    ``initial_phase`` advances the sampling instants, which places the first
    symbol centre at ``-initial_phase`` (mod 2) sample periods.
    """

    symbol_rate: float = 30e9
    samples_per_symbol: int = 2
    cfo_ppm: float = 0.0
    snr_db: float | None = None
    n_symbols: int = 2**18
    seed: int = 1
    rolloff: float = 0.3
    dense_oversampling: int = 8
    adc_bits: int = 6
    jitter_rms: float = 0.0
    initial_phase: float = 0.0

    def __post_init__(self):
        if self.samples_per_symbol != 2:
            raise ValueError("the timing estimator requires samples_per_symbol == 2")
        if self.n_symbols < 2 * BLOCK_SIZE:
            raise ValueError(f"n_symbols must be >= {2 * BLOCK_SIZE}")
        if not 0.0 <= self.rolloff <= 1.0:
            raise ValueError("rolloff must lie in [0, 1]")
        if self.dense_oversampling < 8:
            raise ValueError("dense_oversampling must be >= 8")
        if not 2 <= self.adc_bits <= 16:
            raise ValueError("adc_bits must lie in [2, 16]")
        if self.jitter_rms < 0:
            raise ValueError("jitter_rms must be non-negative")
        if not 0.0 <= self.initial_phase < 2.0:
            raise ValueError("initial_phase must lie in [0, 2)")

    @property
    def sample_rate(self) -> float:
        return self.symbol_rate * self.samples_per_symbol

    @property
    def epsilon(self) -> float:
        return self.cfo_ppm * 1e-6


@dataclass(frozen=True)
class DenseWaveform:
    """Finely sampled transmit waveform.

    ``samples[origin + j * oversampling]`` is the waveform at nominal receiver
    sample ``j``; symbol ``k`` is centred on nominal sample ``2 * k``.
    """

    samples: np.ndarray
    oversampling: int
    origin: int


@dataclass(frozen=True)
class StimulusRun:
    bits: np.ndarray
    blocks: np.ndarray = field(repr=False)


def _splitmix64(x: int) -> int:
    mask = (1 << 64) - 1
    x = (x + 0x9E3779B97F4A7C15) & mask
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & mask
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & mask
    return x ^ (x >> 31)


def generate_bits(seed: int, n: int) -> np.ndarray:
    """PRBS-31 bits whose 31-bit start state is hashed from ``seed``."""
    if n < 1:
        raise ValueError("empty bit stream requested (n must be >= 1)")
    state_word = _splitmix64(int(seed)) & ((1 << 31) - 1) or 1
    state = np.array([(state_word >> i) & 1 for i in range(31)], dtype=np.uint8)
    return _kernels.prbs31(state, int(n))


def raised_cosine(t: np.ndarray, rolloff: float) -> np.ndarray:
    """Raised-cosine impulse response, ``t`` in symbol periods."""
    t = np.asarray(t, dtype=np.float64)
    if rolloff == 0.0:
        return np.sinc(t)
    denom = 1.0 - (2.0 * rolloff * t) ** 2
    singular = np.abs(denom) < 1e-10
    safe = np.where(singular, 1.0, denom)
    p = np.sinc(t) * np.cos(np.pi * rolloff * t) / safe
    return np.where(singular, (np.pi / 4.0) * np.sinc(1.0 / (2.0 * rolloff)), p)


def _polyphase_pulse(rolloff: float, per_symbol: int) -> np.ndarray:
    # row r holds p(j + r/per_symbol) for j = -span..span, each row summing to 1
    j = np.arange(-PULSE_SPAN_SYMBOLS, PULSE_SPAN_SYMBOLS + 1)
    r = np.arange(per_symbol)[:, None] / per_symbol
    taps = raised_cosine(j[None, :] + r, rolloff)
    return taps / taps.sum(axis=1, keepdims=True)


def synthesize_waveform(bits: np.ndarray, cfg: StimulusConfig) -> DenseWaveform:
    """Shape unipolar NRZ levels {0, 1} with a raised-cosine pulse on a dense grid."""
    bits = np.asarray(bits)
    if bits.size == 0:
        raise ValueError("empty bit stream")
    per_symbol = cfg.dense_oversampling * cfg.samples_per_symbol
    phases = _polyphase_pulse(cfg.rolloff, per_symbol)
    levels = bits.astype(np.float64)
    shaped = np.stack([np.convolve(levels, h) for h in phases], axis=1)
    return DenseWaveform(
        samples=shaped.reshape(-1),
        oversampling=cfg.dense_oversampling,
        origin=PULSE_SPAN_SYMBOLS * per_symbol,
    )


def sampling_positions(n_samples: int, cfg: StimulusConfig, rng: np.random.Generator | None = None) -> np.ndarray:
    """Receiver sampling instants in nominal sample periods."""
    k = np.arange(n_samples, dtype=np.float64)
    t = k / (1.0 + cfg.epsilon) + cfg.initial_phase
    if cfg.jitter_rms > 0:
        rng = rng or np.random.default_rng([cfg.seed, 1])
        t = t + rng.normal(0.0, cfg.jitter_rms * cfg.samples_per_symbol, n_samples)
    return t


def evaluate(waveform: DenseWaveform, t: np.ndarray) -> np.ndarray:
    """Interpolate the dense waveform at nominal-sample times ``t``."""
    pos = waveform.origin + np.asarray(t, dtype=np.float64) * waveform.oversampling
    h = _kernels.SINC_HALF_TAPS
    if pos.size and (np.floor(pos.min()) - h + 1 < 0 or np.floor(pos.max()) + h >= waveform.samples.size):
        raise ValueError("sampling instants fall outside the waveform extent (truncation)")
    return _kernels.resample_sinc(waveform.samples, np.ascontiguousarray(pos))


def add_awgn(stream: np.ndarray, snr_db: float, rng: np.random.Generator) -> np.ndarray:
    # signal power is the AC power; the OOK mean carries no information
    power = float(np.var(stream))
    sigma = math.sqrt(power / 10.0 ** (snr_db / 10.0))
    return stream + rng.normal(0.0, sigma, stream.size)


def sample_with_cfo(waveform: DenseWaveform, cfg: StimulusConfig, n_samples: int | None = None) -> np.ndarray:
    """Sample the waveform with a detuned, optionally jittered receiver clock, then add noise."""
    if n_samples is None:
        n_samples = cfg.samples_per_symbol * cfg.n_symbols
    t = sampling_positions(n_samples, cfg)
    stream = evaluate(waveform, t)
    if cfg.snr_db is not None:
        stream = add_awgn(stream, cfg.snr_db, np.random.default_rng([cfg.seed, 2]))
    return stream


def quantize_adc(stream: np.ndarray, cfg: StimulusConfig) -> np.ndarray:
    """Static AGC plus mid-rise quantizer; returns ``(n_blocks, 256)`` signed codes."""
    stream = np.asarray(stream, dtype=np.float64)
    if stream.size < BLOCK_SIZE:
        raise ValueError(f"need at least {BLOCK_SIZE} samples, got {stream.size}")
    ref = float(np.percentile(np.abs(stream), 99.9))
    if ref == 0.0:
        raise ValueError("degenerate input power")
    full = 1 << (cfg.adc_bits - 1)
    codes = np.clip(np.floor(stream * full / ref), -full, full - 1).astype(np.int8 if cfg.adc_bits <= 8 else np.int16)
    n_blocks = codes.size // BLOCK_SIZE
    return codes[: n_blocks * BLOCK_SIZE].reshape(n_blocks, BLOCK_SIZE)


def tx_symbol_count(cfg: StimulusConfig) -> int:
    # enough symbols for the slowest receiver clock plus jitter and phase margin
    return cfg.n_symbols + int(math.ceil(2 * cfg.n_symbols * abs(cfg.epsilon))) + 64


def make_blocks(cfg: StimulusConfig) -> StimulusRun:
    """Full receive chain: bits, shaping, detuned sampling, AC coupling, ADC."""
    bits = generate_bits(cfg.seed, tx_symbol_count(cfg))
    waveform = synthesize_waveform(bits, cfg)
    stream = sample_with_cfo(waveform, cfg)
    stream = stream - stream.mean()
    return StimulusRun(bits=bits, blocks=quantize_adc(stream, cfg))
