#!/usr/bin/env python3
"""Compare the compiled kernel backend against the pure-Python fallback.

Times the two hot kernels on representative workloads: the smoothed
next-token distribution fill (one call per decoding step) and character-level
edit distance (one call per evaluated pair). Run from the repository root:

    python3 benchmarks/bench_kernels.py
"""

from __future__ import annotations

import time

import numpy as np

from mpgen._kernels import _pure

try:
    from mpgen._kernels import _native
except ImportError:
    _native = None


def time_call(fn, *args, repeat: int = 5, inner: int = 200) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(inner):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / inner)
    return best


def bench_smoothed(backend, vocab_size: int, n_counts: int) -> float:
    rng = np.random.RandomState(0)
    ids = np.sort(rng.choice(vocab_size, size=n_counts, replace=False)).astype(np.int64)
    counts = rng.randint(1, 50, size=n_counts).astype(np.float64)
    out = np.empty(vocab_size)
    denom = float(counts.sum()) + 0.1 * vocab_size
    return time_call(backend.smoothed_fill, out, ids, counts, 0.1, denom)


def bench_levenshtein(backend, length: int) -> float:
    rng = np.random.RandomState(1)
    a = rng.randint(32, 127, size=length).astype(np.int32)
    b = rng.randint(32, 127, size=length).astype(np.int32)
    if backend is _pure:
        a, b = list(a), list(b)
    return time_call(backend.levenshtein, a, b, inner=20)


def main() -> None:
    rows = []
    for label, size, n in (("smoothed_fill |V|=500", 500, 30), ("smoothed_fill |V|=5000", 5000, 60)):
        pure_t = bench_smoothed(_pure, size, n)
        native_t = bench_smoothed(_native, size, n) if _native else None
        rows.append((label, pure_t, native_t))
    for label, length in (("levenshtein len=100", 100), ("levenshtein len=400", 400)):
        pure_t = bench_levenshtein(_pure, length)
        native_t = bench_levenshtein(_native, length) if _native else None
        rows.append((label, pure_t, native_t))

    print(f"{'kernel':<26}{'pure':>12}{'native':>12}{'speedup':>10}")
    for label, pure_t, native_t in rows:
        if native_t is None:
            print(f"{label:<26}{pure_t * 1e6:>10.1f}us{'n/a':>12}{'n/a':>10}")
        else:
            print(
                f"{label:<26}{pure_t * 1e6:>10.1f}us{native_t * 1e6:>10.1f}us"
                f"{pure_t / native_t:>9.1f}x"
            )
    if _native is None:
        print("\ncompiled backend not built; run `pip install -e .` to build it")


if __name__ == "__main__":
    main()
