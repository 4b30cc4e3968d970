"""Compare the numba and numpy row-reduction kernels over Z/p.

Run with ``python benchmarks/bench_kernels.py``.  Setting
RESIDUEKIT_DISABLE_NUMBA=1 makes the library default to numpy; this script
calls both backends explicitly, so the flag only matters for the default.
"""

import argparse
import time

import numpy as np

from residuekit import _kernels
from residuekit.exactnum import CHECK_PRIME


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="20,60,120,200")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    p = CHECK_PRIME
    backends = ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])
    if _kernels.HAVE_NUMBA:
        # compile outside the timed region
        _kernels.rank_mod_p(np.eye(3, dtype=np.int64), p, backend="numba")
    print(f"{'n':>5} " + " ".join(f"{b:>12}" for b in backends) + "   ranks agree")
    for n in (int(s) for s in args.sizes.split(",")):
        # rank-deficient on purpose: last quarter of rows are combinations
        a = rng.integers(0, p, size=(n, n), dtype=np.int64)
        k = n - n // 4
        a[k:] = (a[:n - k] * 3 + a[1:n - k + 1]) % p if n - k > 0 else a[k:]
        times, ranks = [], []
        for b in backends:
            ranks.append(_kernels.rank_mod_p(a.copy(), p, backend=b))
            times.append(_time(lambda: _kernels.rank_mod_p(a.copy(), p, backend=b), args.repeat))
        print(f"{n:>5} " + " ".join(f"{t * 1e3:>10.2f}ms" for t in times)
              + f"   {len(set(ranks)) == 1} (rank {ranks[0]})")
    if not _kernels.HAVE_NUMBA:
        print("numba unavailable or disabled; only the numpy path was timed")


if __name__ == "__main__":
    main()
