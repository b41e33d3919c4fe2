#!/usr/bin/env python3
"""Time the numba and pure-numpy variants of the inner kernels.

Both variants run on identical inputs; the script also reports the largest
difference between their outputs.  The numba timings exclude compilation
(one warm-up call is made first).

Usage:
    python3 benchmarks/bench_kernels.py [--terms N] [--level J] [--repeat R] [--json]
"""

from __future__ import annotations

import argparse
import json
import time
from dataclasses import asdict, dataclass

import numpy as np

from sparsewiener import _accel


@dataclass
class KernelTiming:
    kernel: str
    size: str
    numpy_s: float
    numba_s: float | None
    speedup: float | None
    max_abs_diff: float | None


def _best_of(fn, repeat: int) -> tuple[float, np.ndarray]:
    best, out = np.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _compare(name: str, size: str, numpy_fn, numba_fn, repeat: int) -> KernelTiming:
    t_np, ref = _best_of(numpy_fn, repeat)
    if not _accel.HAVE_NUMBA:
        return KernelTiming(name, size, t_np, None, None, None)
    numba_fn()  # compile
    t_nb, got = _best_of(numba_fn, repeat)
    return KernelTiming(name, size, t_np, t_nb, t_np / t_nb, float(np.max(np.abs(ref - got))))


def make_inputs(terms: int, level: int, dim: int, seed: int) -> dict:
    rng = np.random.default_rng(seed)
    freqs = rng.integers(-(1 << (level + 2)), 1 << (level + 2), size=(terms, dim))
    coeffs = rng.standard_normal(terms) + 1j * rng.standard_normal(terms)
    half = 1 << (level - 1)
    nums = rng.integers(-half, half, size=(4 * terms, dim))
    points = rng.uniform(-np.pi, np.pi, size=(4 * terms, dim))
    ngroups = max(1, terms // 8)
    group = rng.integers(0, ngroups, size=terms)
    return dict(freqs=freqs, coeffs=coeffs, nums=nums, points=points, group=group,
                ngroups=ngroups, level=level)


def run(terms: int, level: int, dim: int, repeat: int, seed: int = 0) -> list[KernelTiming]:
    a = make_inputs(terms, level, dim, seed)
    f, c, lev = a["freqs"], a["coeffs"], a["level"]
    kax = np.ascontiguousarray(f[:, 0])
    samples = _accel.axis_node_sums_numpy(a["group"], kax, c, lev, a["ngroups"])
    results = [
        _compare("dyadic_exp_sum", f"{terms} terms x {a['nums'].shape[0]} nodes",
                 lambda: _accel.dyadic_exp_sum_numpy(f, c, a["nums"], lev),
                 lambda: _accel.dyadic_exp_sum_numba(f, c, a["nums"], lev), repeat),
        _compare("float_exp_sum", f"{terms} terms x {a['points'].shape[0]} points",
                 lambda: _accel.float_exp_sum_numpy(f, c, a["points"]),
                 lambda: _accel.float_exp_sum_numba(f, c, a["points"]), repeat),
        _compare("axis_node_sums", f"{terms} terms, 2^{lev} nodes",
                 lambda: _accel.axis_node_sums_numpy(a["group"], kax, c, lev, a["ngroups"]),
                 lambda: _accel.axis_node_sums_numba(a["group"], kax, c, lev, a["ngroups"]),
                 repeat),
        _compare("axis_node_dft", f"{a['ngroups']} rows, 2^{lev} nodes",
                 lambda: _accel.axis_node_dft_numpy(samples, lev),
                 lambda: _accel.axis_node_dft_numba(samples, lev), repeat),
    ]
    return results


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--terms", type=int, default=2000, help="number of Fourier terms")
    parser.add_argument("--level", type=int, default=8, help="dyadic node level")
    parser.add_argument("--dim", type=int, default=2)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--json", action="store_true", help="print JSON instead of a table")
    args = parser.parse_args()

    results = run(args.terms, args.level, args.dim, args.repeat)
    if args.json:
        print(json.dumps([asdict(r) for r in results], indent=2))
        return
    print(f"{'kernel':<16} {'size':<30} {'numpy [s]':>10} {'numba [s]':>10} {'speedup':>8} {'max diff':>10}")
    for r in results:
        nb = f"{r.numba_s:10.4f}" if r.numba_s is not None else f"{'n/a':>10}"
        sp = f"{r.speedup:8.1f}" if r.speedup is not None else f"{'n/a':>8}"
        diff = f"{r.max_abs_diff:10.2e}" if r.max_abs_diff is not None else f"{'n/a':>10}"
        print(f"{r.kernel:<16} {r.size:<30} {r.numpy_s:10.4f} {nb} {sp} {diff}")


if __name__ == "__main__":
    main()
