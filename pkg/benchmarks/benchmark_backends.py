#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure numpy/python fallbacks.

Times the four hot kernels (suffix ordering, adjacent common-prefix
lengths, repeat-class enumeration, seeded shuffle) plus the end-to-end
block-statistics pass, on coin-flip text and on a skewed-alphabet text
that imitates natural-language unigram statistics.

Usage:
    python benchmarks/benchmark_backends.py
    python benchmarks/benchmark_backends.py --sizes 100000 1000000 --output results.json
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from blockrep import _kernels_numpy as numpy_kernels  # noqa: E402
from blockrep.rng import splitmix_stream, uniform_doubles  # noqa: E402

try:
    from blockrep import _kernels_numba as numba_kernels

    NUMBA_AVAILABLE = True
except ImportError:
    numba_kernels = None
    NUMBA_AVAILABLE = False


def make_input(kind: str, n: int, seed: int) -> np.ndarray:
    u = uniform_doubles(splitmix_stream(seed, n))
    if kind == "coinflip":
        return (u < 0.5).astype(np.int32)
    # skewed 27-symbol distribution, roughly english-like unigram weights
    weights = np.array([8.2, 1.5, 2.8, 4.3, 12.7, 2.2, 2.0, 6.1, 7.0, 0.2, 0.8,
                        4.0, 2.4, 6.7, 7.5, 1.9, 0.1, 6.0, 6.3, 9.1, 2.8, 1.0,
                        2.4, 0.2, 2.0, 0.1, 18.0])
    cdf = np.cumsum(weights / weights.sum())
    return np.searchsorted(cdf, u).astype(np.int32)


def time_call(fn, *args, repeats: int = 3) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def bench_backend(kernels, codes: np.ndarray, repeats: int) -> dict[str, float]:
    out: dict[str, float] = {}
    out["suffix_array"] = time_call(kernels.suffix_array, codes, repeats=repeats)
    sa = kernels.suffix_array(codes)
    out["lcp_array"] = time_call(kernels.lcp_array, codes, sa, repeats=repeats)
    lcp = kernels.lcp_array(codes, sa)
    out["repeat_classes"] = time_call(kernels.repeat_classes, lcp, repeats=repeats)
    counts, lo, hi = kernels.repeat_classes(lcp)
    m_cap = int(lcp[1:].max()) + 1 if codes.shape[0] > 1 else 1
    out["power_diff"] = time_call(
        kernels.power_diff_int64, counts, lo, hi, 2, m_cap, repeats=repeats
    )
    out["shuffle"] = time_call(
        kernels.shuffle_codes, codes.astype(np.uint32), np.uint64(99), repeats=repeats
    )
    out["total"] = sum(v for k, v in out.items() if k != "shuffle")
    return out


def main() -> int:
    parser = argparse.ArgumentParser(description="Compare kernel backends")
    parser.add_argument("--sizes", type=int, nargs="+",
                        default=[50_000, 200_000, 1_000_000])
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--output", type=str, default=None, help="json results file")
    args = parser.parse_args()

    if NUMBA_AVAILABLE:
        print("warming up jit kernels...")
        numba_kernels.warmup()
    else:
        print("numba not importable; timing the fallback only")

    results = []
    header = f"{'input':>12} {'n':>9} {'kernel':>15} {'numba (s)':>11} {'numpy (s)':>11} {'speedup':>9}"
    for kind in ("coinflip", "skewed"):
        print(f"\n{'=' * len(header)}")
        print(header)
        print("-" * len(header))
        for n in args.sizes:
            codes = make_input(kind, n, seed=7)
            numpy_times = bench_backend(numpy_kernels, codes, args.repeats)
            numba_times = (
                bench_backend(numba_kernels, codes, args.repeats)
                if NUMBA_AVAILABLE
                else {k: float("nan") for k in numpy_times}
            )
            for key in numpy_times:
                ratio = numpy_times[key] / numba_times[key] if NUMBA_AVAILABLE else float("nan")
                print(f"{kind:>12} {n:>9} {key:>15} {numba_times[key]:>11.4f} "
                      f"{numpy_times[key]:>11.4f} {ratio:>8.1f}x")
                results.append({
                    "input": kind, "n": n, "kernel": key,
                    "numba_s": numba_times[key], "numpy_s": numpy_times[key],
                })

    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            json.dump({"numba_available": NUMBA_AVAILABLE, "results": results}, fh, indent=2)
        print(f"\nresults written to {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
