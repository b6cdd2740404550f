"""Dense elimination kernels over a prime field.

The numba kernel is used when numba imports cleanly and ``QBT_NO_NUMBA`` is
unset; otherwise a vectorised numpy kernel is used. Both take an ``int64``
matrix with entries already reduced into ``[0, p)`` and return its rank.
The prime must be below ``2**31`` so that products fit in ``int64``.
"""

import os

import numpy as np

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_AVAILABLE = False

USE_NUMBA = NUMBA_AVAILABLE and os.environ.get("QBT_NO_NUMBA", "") in ("", "0")


def _inv_mod(a, p):
    return pow(int(a), p - 2, p)


def rank_mod_p_numpy(a, p):
    """Rank of ``a`` over GF(p) by row reduction with numpy row operations."""
    a = np.array(a, dtype=np.int64, copy=True)
    rows, cols = a.shape
    rank = 0
    for c in range(cols):
        if rank == rows:
            break
        nz = np.nonzero(a[rank:, c])[0]
        if nz.size == 0:
            continue
        piv = rank + int(nz[0])
        if piv != rank:
            a[[rank, piv]] = a[[piv, rank]]
        inv = _inv_mod(a[rank, c], p)
        a[rank, c:] = (a[rank, c:] * inv) % p
        below = a[rank + 1:, c]
        idx = np.nonzero(below)[0]
        if idx.size:
            tgt = rank + 1 + idx
            f = below[idx].reshape(-1, 1)
            a[tgt, c:] = (a[tgt, c:] - (f * a[rank, c:]) % p) % p
        rank += 1
    return rank


if NUMBA_AVAILABLE:

    @njit(cache=True)
    def _powmod(a, e, p):
        r = 1
        a = a % p
        while e > 0:
            if e & 1:
                r = (r * a) % p
            a = (a * a) % p
            e >>= 1
        return r

    @njit(cache=True)
    def _rank_mod_p_inplace(a, p):
        rows, cols = a.shape
        rank = 0
        for c in range(cols):
            if rank == rows:
                break
            piv = -1
            for i in range(rank, rows):
                if a[i, c] != 0:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != rank:
                for j in range(c, cols):
                    t = a[rank, j]
                    a[rank, j] = a[piv, j]
                    a[piv, j] = t
            inv = _powmod(a[rank, c], p - 2, p)
            for j in range(c, cols):
                a[rank, j] = (a[rank, j] * inv) % p
            for i in range(rank + 1, rows):
                f = a[i, c]
                if f != 0:
                    for j in range(c, cols):
                        v = a[i, j] - (f * a[rank, j]) % p
                        if v < 0:
                            v += p
                        a[i, j] = v
            rank += 1
        return rank

    def rank_mod_p_numba(a, p):
        """Rank of ``a`` over GF(p) with the compiled kernel."""
        work = np.array(a, dtype=np.int64, copy=True)
        return int(_rank_mod_p_inplace(work, np.int64(p)))

else:  # pragma: no cover

    def rank_mod_p_numba(a, p):
        raise RuntimeError("numba is not available")


def rank_mod_p(a, p):
    """Dispatch to the active backend."""
    a = np.asarray(a, dtype=np.int64)
    if a.size == 0:
        return 0
    if USE_NUMBA:
        return rank_mod_p_numba(a, p)
    return rank_mod_p_numpy(a, p)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
