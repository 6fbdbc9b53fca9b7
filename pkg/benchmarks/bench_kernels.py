"""Time the compiled and numpy prefix-maximum kernels on the same inputs.

Usage: python benchmarks/bench_kernels.py [--repeat R]
"""
import argparse
import time

import numpy as np

from charmax import kernels
from charmax.chargroup import CoefficientVector, multiplicative_max_partial
from charmax.numtheory import build_group_context

CASES = [
    # (label, rows, support size)
    ("phase  p=1019  s=2", 1018, 2),
    ("phase  p=1019  s=64", 1018, 64),
    ("phase  p=4999  s=8", 4998, 8),
    ("phase  p=4999  full", 4998, 4998),
]


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    backends = ["python"] + (["cython"] if kernels.BACKEND == "cython" else [])
    if len(backends) == 1:
        print("compiled extension not available; timing the numpy kernel only")
    rng = np.random.default_rng(0)
    print(f"{'case':24s}" + "".join(f"{b:>12s}" for b in backends) + ("   speedup" if len(backends) == 2 else ""))
    for label, n, k in CASES:
        p = n + 1
        ctx = build_group_context(p)
        idx = np.sort(rng.choice(np.arange(1, p), size=k, replace=False))
        coef = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        freq = ctx.nu[idx]
        points = np.arange(n)
        times = []
        for b in backends:
            times.append(_time(lambda: kernels.max_partial_phase(coef, freq, points, n, backend=b),
                               args.repeat))
        row = f"{label:24s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times)
        if len(times) == 2:
            row += f"   {times[0] / times[1]:7.1f}x"
        print(row)
    # end-to-end call through the public API
    ctx = build_group_context(4999)
    a = CoefficientVector.from_dense(rng.standard_normal(4998))
    t = _time(lambda: multiplicative_max_partial(ctx, a), args.repeat)
    print(f"multiplicative_max_partial p=4999 dense ({kernels.BACKEND}): {t * 1e3:.1f} ms")


if __name__ == "__main__":
    main()
