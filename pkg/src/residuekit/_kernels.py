"""Row-reduction kernels over a prime field Z/p.

Two interchangeable implementations live here: a numba-compiled loop kernel
and a vectorised numpy one.  The numba path is used unless numba is missing
or ``RESIDUEKIT_DISABLE_NUMBA`` is set to a non-empty value other than "0".
Both operate on int64 arrays with entries in [0, p) and require p < 2**31 so
that products of two residues fit in 64 bits.
"""

import os

import numpy as np

_flag = os.environ.get("RESIDUEKIT_DISABLE_NUMBA", "")
_DISABLED = _flag not in ("", "0")

try:
    if _DISABLED:
        raise ImportError
    from numba import njit
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

MAX_PRIME = 2**31 - 1


def _inv_mod(a, p):
    # Fermat inverse, p prime
    result = 1
    base = a % p
    e = p - 2
    while e > 0:
        if e & 1:
            result = (result * base) % p
        base = (base * base) % p
        e >>= 1
    return result


def _rref_loops(a, p):
    """In-place reduced row echelon form; returns (rank, pivot columns, det sign/scale).

    The third value is the product of the pivots (times the row-swap sign)
    and equals the determinant when ``a`` is square and of full rank.
    """
    m, n = a.shape
    pivots = np.empty(min(m, n), dtype=np.int64)
    rank = 0
    det = 1
    for col in range(n):
        if rank == m:
            break
        piv = -1
        for i in range(rank, m):
            if a[i, col] != 0:
                piv = i
                break
        if piv < 0:
            det = 0
            continue
        if piv != rank:
            for k in range(n):
                tmp = a[rank, k]
                a[rank, k] = a[piv, k]
                a[piv, k] = tmp
            det = (p - det) % p
        pv = a[rank, col]
        det = (det * pv) % p
        inv = _inv_mod(pv, p)
        for k in range(n):
            a[rank, k] = (a[rank, k] * inv) % p
        for i in range(m):
            if i != rank:
                f = a[i, col]
                if f != 0:
                    for k in range(col, n):
                        a[i, k] = (a[i, k] - f * a[rank, k]) % p
        pivots[rank] = col
        rank += 1
    if rank < n or m != n:
        det = 0
    return rank, pivots[:rank], det


def _rref_numpy(a, p):
    m, n = a.shape
    pivots = []
    rank = 0
    det = 1
    for col in range(n):
        if rank == m:
            break
        nz = np.nonzero(a[rank:, col])[0]
        if nz.size == 0:
            det = 0
            continue
        piv = rank + int(nz[0])
        if piv != rank:
            a[[rank, piv]] = a[[piv, rank]]
            det = (p - det) % p
        pv = int(a[rank, col])
        det = (det * pv) % p
        a[rank] = (a[rank] * pow(pv, p - 2, p)) % p
        factors = a[:, col].copy()
        factors[rank] = 0
        rows = np.nonzero(factors)[0]
        if rows.size:
            a[rows] = (a[rows] - np.outer(factors[rows], a[rank]) % p) % p
        pivots.append(col)
        rank += 1
    if rank < n or m != n:
        det = 0
    return rank, np.array(pivots, dtype=np.int64), det


if HAVE_NUMBA:
    _inv_mod = njit(cache=True)(_inv_mod)
    _rref_impl = njit(cache=True)(_rref_loops)
else:
    _rref_impl = _rref_numpy


def rref_mod_p(a, p, backend=None):
    """Row-reduce a copy of ``a`` modulo ``p``.

    ``backend`` may be "numba", "numpy" or None (module default).
    Returns ``(reduced, rank, pivots, det)``.
    """
    if p > MAX_PRIME:
        raise ValueError(f"prime {p} too large for int64 kernels")
    work = np.array(a, dtype=np.int64, copy=True) % p
    if work.ndim != 2:
        raise ValueError("expected a 2-d array")
    if work.size == 0:
        m, n = work.shape
        return work, 0, np.zeros(0, dtype=np.int64), 1 if m == n else 0
    if backend is None:
        fn = _rref_impl
    elif backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend unavailable")
        fn = _rref_impl
    elif backend == "numpy":
        fn = _rref_numpy
    else:
        raise ValueError(f"unknown backend {backend!r}")
    rank, pivots, det = fn(work, p)
    return work, int(rank), pivots, int(det)


def rank_mod_p(a, p, backend=None):
    return rref_mod_p(a, p, backend)[1]
