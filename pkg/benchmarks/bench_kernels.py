"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each kernel is run once before timing so numba compilation is excluded.
The end-to-end row toggles ``LATCOUNT_NUMBA`` in-process.
"""

import argparse
import itertools
import os
import sys
import timeit
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from gen import bounded_systems  # noqa: E402
from latcount import _kernels  # noqa: E402
from latcount.counting import count_canonical  # noqa: E402


def _level_table(rng, order=64, r=8, width=400, w=3):
    prev = rng.integers(-50, 50, size=(order, width), dtype=np.int64)
    prev[:, width - w * r:] = 0  # headroom for the shifts
    return prev, rng.permutation(order).reshape(order // r, r)


def dp_level_case(rng):
    prev, cosets = _level_table(rng)
    return lambda use: _kernels.dp_level(prev, cosets, 3, "sliding", use)


def dp_naive_case(rng):
    prev, cosets = _level_table(rng)
    return lambda use: _kernels.dp_level(prev, cosets, 3, "naive", use)


def basis_scan_case(rng):
    m, n = 14, 4
    A = rng.integers(-3, 4, size=(m, n)).astype(np.float64)
    b = rng.integers(0, 7, size=m).astype(np.float64)
    subsets = np.array(list(itertools.combinations(range(m), n)), dtype=np.int64)
    return lambda use: _kernels.basis_scan(A, b, subsets, use_numba=use)


def knapsack_case(rng):
    radix = (60, 60)
    coords = np.array(np.unravel_index(np.arange(np.prod(radix)), radix)).T.astype(np.int64)
    coords = np.ascontiguousarray(coords[:, ::-1])
    old = rng.integers(0, 100, size=len(coords)).astype(np.int64)
    a = np.array([2, 3], dtype=np.int64)
    offset = a[0] + a[1] * radix[0]
    return lambda use: _kernels.knapsack_layer(old, coords, a, offset, 5, -1, use)


def counting_case(_rng):
    systems = [C for C in bounded_systems(11, 40)]

    def run(use):
        os.environ["LATCOUNT_NUMBA"] = "1" if use else "0"
        try:
            return [count_canonical(C).count for C in systems]
        finally:
            os.environ.pop("LATCOUNT_NUMBA", None)
    return run


CASES = [("dp_level sliding", dp_level_case), ("dp_level naive", dp_naive_case),
         ("basis_scan", basis_scan_case), ("knapsack_layer", knapsack_case),
         ("count_canonical x40", counting_case)]


def _agree(a, b):
    if isinstance(a, tuple):
        return all(_agree(x, y) for x, y in zip(a, b))
    a, b = np.asarray(a), np.asarray(b)
    if a.dtype.kind == "f":
        return np.allclose(a, b, rtol=1e-9, atol=1e-9)
    return np.array_equal(a, b)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not _kernels.numba_enabled():
        print("numba unavailable or disabled; nothing to compare")
        return 1
    print(f"{'kernel':<22}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}")
    for name, make in CASES:
        fn = make(np.random.default_rng(0))
        a, b = fn(True), fn(False)
        same = _agree(a, b)
        if not same:
            print(f"{name}: backends disagree")
            return 1
        t_nb = min(timeit.repeat(lambda: fn(True), number=1, repeat=args.repeat)) * 1e3
        t_np = min(timeit.repeat(lambda: fn(False), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<22}{t_nb:>12.2f}{t_np:>12.2f}{t_np / t_nb:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
