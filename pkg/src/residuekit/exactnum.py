"""Exact scalars and dense exact linear algebra over Q or Z/p.

Rational scalars are Python ``int`` or ``fractions.Fraction`` (always reduced,
positive denominator).  Prime-field scalars are ints in ``[0, p)``.  A
:class:`Field` value is the computation context; it is never mixed within a
single computation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import lcm
from typing import Sequence

import numpy as np

from . import _kernels

# prime used for the modular fast paths of rational rank computations
CHECK_PRIME = 2147483629


class FieldError(ValueError):
    pass


@dataclass(frozen=True)
class Field:
    """Coefficient field: ``p == 0`` means Q, otherwise Z/p for a prime p."""

    p: int = 0

    def __post_init__(self):
        if self.p < 0 or self.p == 1:
            raise FieldError(f"invalid characteristic {self.p}")
        if self.p and not _is_prime(self.p):
            raise FieldError(f"{self.p} is not prime")

    @property
    def name(self) -> str:
        return "Q" if self.p == 0 else f"Fp:{self.p}"

    def __str__(self):
        return self.name

    @classmethod
    def parse(cls, text: str) -> "Field":
        text = text.strip()
        if text in ("Q", "QQ"):
            return cls(0)
        if text.startswith("Fp:"):
            try:
                return cls(int(text[3:]))
            except ValueError:
                pass
        raise FieldError(f"unknown field {text!r}; expected 'Q' or 'Fp:<p>'")

    def __call__(self, x):
        """Coerce an int, Fraction or numeric string into this field."""
        if isinstance(x, str):
            x = Fraction(x)
        if self.p == 0:
            if isinstance(x, Fraction):
                return x.numerator if x.denominator == 1 else x
            if isinstance(x, int):
                return x
            raise FieldError(f"cannot coerce {x!r} into Q")
        if isinstance(x, Fraction):
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        if isinstance(x, int):
            return x % self.p
        raise FieldError(f"cannot coerce {x!r} into {self.name}")

    def norm(self, x):
        # canonical representative after arithmetic
        if self.p:
            return x % self.p
        if isinstance(x, Fraction) and x.denominator == 1:
            return x.numerator
        return x

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.p:
            return pow(x, -1, self.p)
        return self.norm(Fraction(1) / x)

    def div(self, a, b):
        if self.p:
            return a * pow(b, -1, self.p) % self.p
        return self.norm(Fraction(a) / b)

    def neg(self, a):
        return (-a) % self.p if self.p else -a

    def is_unit(self, x) -> bool:
        return x != 0

    def format(self, x) -> str:
        return str(x)


QQ = Field(0)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class ExactMatrix:
    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entries.length must equal rows * cols")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], field: Field = QQ) -> "ExactMatrix":
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged matrix")
        return cls(len(rows), ncols, tuple(field(x) for r in rows for x in r))

    def to_rows(self) -> list[list]:
        c = self.cols
        return [list(self.entries[i * c:(i + 1) * c]) for i in range(self.rows)]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]


def _as_rows(M) -> list[list]:
    if isinstance(M, ExactMatrix):
        return M.to_rows()
    return [list(r) for r in M]


def _shape(rows, ncols=None):
    m = len(rows)
    n = len(rows[0]) if m else (ncols or 0)
    return m, n


def rref(M, field: Field = QQ, ncols: int | None = None):
    """Reduced row echelon form by exact Gauss-Jordan elimination.

    Returns ``(rows, pivots)``.  ``ncols`` is only needed for 0-row inputs.
    """
    a = [[field(x) for x in r] for r in _as_rows(M)]
    m, n = _shape(a, ncols)
    if field.p:
        if m == 0 or n == 0:
            return a, []
        red, rank, piv, _ = _kernels.rref_mod_p(np.array(a, dtype=np.int64), field.p)
        return [[int(x) for x in row] for row in red], [int(c) for c in piv]
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        k = next((i for i in range(r, m) if a[i][c] != 0), None)
        if k is None:
            continue
        a[r], a[k] = a[k], a[r]
        pv = a[r][c]
        if pv != 1:
            a[r] = [field.div(x, pv) for x in a[r]]
        for i in range(m):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                row_r = a[r]
                a[i] = [field.norm(x - f * y) for x, y in zip(a[i], row_r)]
        pivots.append(c)
        r += 1
    return a, pivots


def mat_kernel(M, field: Field = QQ, ncols: int | None = None) -> list[list]:
    """Basis of the right kernel {v : M v = 0}, one vector per free column."""
    red, pivots = rref(M, field, ncols)
    _, n = _shape(red, ncols)
    free = [c for c in range(n) if c not in set(pivots)]
    basis = []
    for fc in free:
        v = [0] * n
        v[fc] = 1
        for row, pc in zip(red, pivots):
            if row[fc] != 0:
                v[pc] = field.neg(row[fc])
        basis.append(v)
    return basis


def _integer_rows(rows):
    """Scale each rational row by the lcm of its denominators."""
    out = []
    for r in rows:
        den = reduce(lcm, (Fraction(x).denominator for x in r), 1)
        out.append([int(Fraction(x) * den) for x in r])
    return out


def bareiss(rows: list[list[int]]):
    """Fraction-free elimination on an integer matrix.

    Returns ``(rank, last_pivot_with_sign)``; for a square nonsingular input
    the second value is the determinant.
    """
    a = [list(r) for r in rows]
    m, n = _shape(a)
    sign = 1
    prev = 1
    r = 0
    for c in range(n):
        if r == m:
            break
        k = next((i for i in range(r, m) if a[i][c] != 0), None)
        if k is None:
            continue
        if k != r:
            a[r], a[k] = a[k], a[r]
            sign = -sign
        pv = a[r][c]
        for i in range(r + 1, m):
            ai = a[i]
            f = ai[c]
            ar = a[r]
            for j in range(c + 1, n):
                ai[j] = (pv * ai[j] - f * ar[j]) // prev
            ai[c] = 0
        # rows above the pivot row are untouched: only forward elimination
        prev = pv
        r += 1
    return r, sign * prev


def mat_rank(M, field: Field = QQ) -> int:
    rows = _as_rows(M)
    m, n = _shape(rows)
    if m == 0 or n == 0:
        return 0
    if field.p:
        return _kernels.rank_mod_p(np.array([[field(x) for x in r] for r in rows], dtype=np.int64), field.p)
    # the modular rank is a lower bound; it is exact once it is maximal
    lower = rank_lower_bound(rows)
    if lower == min(m, n):
        return lower
    return bareiss(_integer_rows(rows))[0]


def reduce_mod(rows, p: int = CHECK_PRIME):
    """Reduce a rational matrix modulo p, or None if a denominator vanishes mod p."""
    F = Field(p) if p != CHECK_PRIME else _CHECK_FIELD
    try:
        return np.array([[F(x) for x in r] for r in rows], dtype=np.int64)
    except ValueError:
        return None


def rank_lower_bound(M) -> int:
    """Rank modulo CHECK_PRIME; never exceeds the rank over Q.

    Returns 0 (a trivially valid bound) if some denominator is divisible by
    the prime.
    """
    rows = _as_rows(M)
    m, n = _shape(rows)
    if m == 0 or n == 0:
        return 0
    arr = reduce_mod(rows)
    if arr is None:
        return 0
    return _kernels.rank_mod_p(arr, CHECK_PRIME)


def mat_det(M, field: Field = QQ):
    rows = _as_rows(M)
    m, n = _shape(rows)
    if m != n:
        raise ValueError(f"determinant of non-square {m}x{n} matrix")
    if m == 0:
        return field(1)
    if field.p:
        arr = np.array([[field(x) for x in r] for r in rows], dtype=np.int64)
        return _kernels.rref_mod_p(arr, field.p)[3]
    scale = 1
    ints = []
    for r in rows:
        den = reduce(lcm, (Fraction(x).denominator for x in r), 1)
        scale *= den
        ints.append([int(Fraction(x) * den) for x in r])
    rank, det = bareiss(ints)
    if rank < n:
        return 0
    return field(Fraction(det, scale))



_CHECK_FIELD = Field(CHECK_PRIME)
