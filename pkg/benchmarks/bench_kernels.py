"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Each kernel is called once per backend before timing so JIT compilation
is not counted. Results are checked for agreement as they are timed.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from hsdcodes import kernels
from hsdcodes.field import field_from_order


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases():
    rng = np.random.default_rng(0)
    F4, F16, F64 = (field_from_order(q) for q in (4, 16, 64))

    G = rng.integers(0, 4, (9, 18))
    yield "min_weight [18,9] GF(4)", lambda b: kernels.min_weight(G, F4.zech, F4.zero_code, 3, backend=b)

    H = rng.integers(0, 16, (5, 10))
    yield "min_weight [10,5] GF(16)", lambda b: kernels.min_weight(H, F16.zech, F16.zero_code, 15, backend=b)

    stack = rng.integers(0, 64, (924, 6, 6))
    yield "batched_rank 924 x 6x6 GF(64)", lambda b: kernels.batched_rank(
        stack, F64.zech, F64.zero_code, 63, F64.neg_shift, backend=b
    )

    mats = rng.integers(0, 16, (20000, 3, 3))
    gen = rng.integers(0, 16, (3, 3))
    yield "right_multiply 20000 x 3x3 GF(16)", lambda b: kernels.right_multiply(
        mats, gen, F16.zech, F16.zero_code, 15, backend=b
    )


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    print(f"{'kernel':<36}{'numba s':>10}{'numpy s':>10}{'speedup':>9}")
    for name, run in cases():
        run("numba")  # compile
        t_nb, r_nb = best_of(lambda: run("numba"), args.repeat)
        t_np, r_np = best_of(lambda: run("numpy"), args.repeat)
        assert np.array_equal(np.asarray(r_nb), np.asarray(r_np)), name
        print(f"{name:<36}{t_nb:>10.4f}{t_np:>10.4f}{t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
