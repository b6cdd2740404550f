"""Compare the numba and numpy prime-field rank kernels.

Two workloads: random dense matrices of growing size, and the real Macaulay
blocks of a catalog ideal (the hot path of Hilbert-function fits).

    python benchmarks/bench_rank.py [--sizes 100 200 400] [--repeat 3]
"""

import argparse
import time

import numpy as np

from qbt import _kernels
from qbt.catalog import get_entry
from qbt.exactmath import default_prime
from qbt.poly import macaulay_blocks


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def random_rank_deficient(n, p, seed):
    rng = np.random.default_rng(seed)
    k = n * 3 // 4
    left = rng.integers(0, p, size=(n, k), dtype=np.int64)
    right = rng.integers(0, p, size=(k, n), dtype=np.int64)
    # product mod p, accumulated in object dtype to avoid overflow
    return (left.astype(object) @ right.astype(object) % p).astype(np.int64)


def macaulay_matrices(entry, t, p):
    gens = list(get_entry(entry).polys_of("forms"))
    mats = []
    for cols, rows in macaulay_blocks(gens, t):
        ci = {m: i for i, m in enumerate(cols)}
        a = np.zeros((len(rows), len(cols)), dtype=np.int64)
        for i, row in enumerate(rows):
            for m, c in row.items():
                a[i, ci[m]] = int(c.numerator * pow(c.denominator, -1, p)) % p
        mats.append(a)
    return mats


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 200, 400])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--entry", default="severi-p2xp2")
    ap.add_argument("--t", type=int, default=5)
    args = ap.parse_args()
    p = default_prime()
    if not _kernels.NUMBA_AVAILABLE:
        raise SystemExit("numba is not importable; nothing to compare")
    # compile outside the timed region
    _kernels.rank_mod_p_numba(np.eye(2, dtype=np.int64), p)

    print(f"prime {p}, best of {args.repeat}")
    print(f"{'workload':<28}{'rank':>8}{'numpy s':>12}{'numba s':>12}{'speedup':>10}")
    for n in args.sizes:
        a = random_rank_deficient(n, p, seed=n)
        tn, rn = best_of(lambda: _kernels.rank_mod_p_numpy(a, p), args.repeat)
        tj, rj = best_of(lambda: _kernels.rank_mod_p_numba(a, p), args.repeat)
        assert rn == rj, (rn, rj)
        print(f"{'random ' + str(n) + 'x' + str(n):<28}{rn:>8}{tn:>12.4f}{tj:>12.4f}{tn / tj:>10.1f}")

    mats = macaulay_matrices(args.entry, args.t, p)
    tn, rn = best_of(lambda: sum(_kernels.rank_mod_p_numpy(m, p) for m in mats), args.repeat)
    tj, rj = best_of(lambda: sum(_kernels.rank_mod_p_numba(m, p) for m in mats), args.repeat)
    assert rn == rj, (rn, rj)
    label = f"{args.entry} t={args.t} ({len(mats)} blk)"
    print(f"{label:<28}{rn:>8}{tn:>12.4f}{tj:>12.4f}{tn / tj:>10.1f}")


if __name__ == "__main__":
    main()
