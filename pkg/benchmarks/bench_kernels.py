"""Numba vs numpy timings for the hot kernels and for a full pipeline run.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--symbols 262144]

Kernel timings compare the ``*_numba`` and ``*_numpy`` twins in-process.
The end-to-end timings start a fresh interpreter per backend, because the
backend is chosen at import time from ``CLOCKREC_DISABLE_NUMBA``.
"""
from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from clockrec import _kernels
from clockrec.lagrange_interp import lagrange_basis

END_TO_END = """
import time
from clockrec.experiment import ExperimentConfig, run_experiment
from clockrec.stimulus import StimulusConfig
from clockrec import _kernels
cfg = ExperimentConfig(stimulus=StimulusConfig(n_symbols={n}))
run_experiment(cfg, 100.0)  # warm-up (JIT compile / cache load)
t = time.perf_counter()
run_experiment(cfg, 100.0)
print(_kernels.BACKEND, time.perf_counter() - t)
"""


def _best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def kernel_table(repeat: int):
    rng = np.random.default_rng(0)
    state = rng.integers(0, 2, 31).astype(np.uint8)
    dense = rng.normal(size=8 * 2**19)
    pos = np.sort(rng.uniform(16, dense.size - 16, 2**19))
    window = rng.integers(-32, 32, 261).astype(np.int64)
    coeffs = lagrange_basis(21)
    windows = [window] * 2048

    cases = {
        "prbs31 (2^18 bits)": (lambda: _kernels.prbs31_numba(state, 2**18),
                               lambda: _kernels.prbs31_numpy(state, 2**18)),
        "resample_sinc (2^19 points)": (lambda: _kernels.resample_sinc_numba(dense, pos),
                                        lambda: _kernels.resample_sinc_numpy(dense, pos)),
        "lagrange_mac (2048 windows)": (
            lambda: [_kernels.lagrange_mac_numba(w, coeffs, -32, 31) for w in windows],
            lambda: [_kernels.lagrange_mac_numpy(w, coeffs, -32, 31) for w in windows]),
    }
    rows = []
    for name, (jit, ref) in cases.items():
        jit()  # compile outside the timed region
        t_jit, t_ref = _best(jit, repeat), _best(ref, repeat)
        rows.append((name, t_jit, t_ref))
    return rows


def end_to_end(n_symbols: int):
    out = {}
    for flag in ("0", "1"):
        env = dict(os.environ, CLOCKREC_DISABLE_NUMBA=flag)
        proc = subprocess.run([sys.executable, "-c", END_TO_END.format(n=n_symbols)],
                              env=env, capture_output=True, text=True, check=True)
        backend, seconds = proc.stdout.split()
        out[backend] = float(seconds)
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--symbols", type=int, default=2**18)
    args = ap.parse_args(argv)

    if not _kernels.HAVE_NUMBA:
        print("numba not available; nothing to compare")
        return 1
    print(f"{'kernel':<30}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}")
    for name, t_jit, t_ref in kernel_table(args.repeat):
        print(f"{name:<30}{t_jit * 1e3:12.2f}{t_ref * 1e3:12.2f}{t_ref / t_jit:10.1f}x")

    e2e = end_to_end(args.symbols)
    print(f"\nrun_experiment, {args.symbols} symbols:")
    for backend, seconds in e2e.items():
        print(f"  {backend:<6} {seconds:8.2f} s")
    if len(e2e) == 2:
        print(f"  speedup {e2e['numpy'] / e2e['numba']:.2f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
