"""Small dense matrices with polynomial entries (lists of rows of Poly)."""

from __future__ import annotations

from functools import lru_cache

from .poly import Poly, PolyTower


def zeros(tower: PolyTower, m: int, n: int) -> list[list[Poly]]:
    z = tower.zero()
    return [[z] * n for _ in range(m)]


def identity(tower: PolyTower, n: int) -> list[list[Poly]]:
    out = zeros(tower, n, n)
    for i in range(n):
        out[i][i] = tower.one()
    return out


def matmul(a, b, tower: PolyTower) -> list[list[Poly]]:
    m = len(a)
    k = len(b)
    n = len(b[0]) if b else 0
    if a and len(a[0]) != k:
        raise ValueError(f"shape mismatch {m}x{len(a[0])} @ {k}x{n}")
    out = zeros(tower, m, n)
    for i in range(m):
        for j in range(n):
            acc = tower.zero()
            for t in range(k):
                x, y = a[i][t], b[t][j]
                if x and y:
                    acc = acc + x * y
            out[i][j] = acc
    return out


def transpose(a, ncols: int | None = None) -> list[list[Poly]]:
    if not a:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*a)]


def is_zero(a) -> bool:
    return all(x.is_zero() for row in a for x in row)


def scale(a, c) -> list[list[Poly]]:
    return [[x * c for x in row] for row in a]


def add(a, b):
    return [[x + y for x, y in zip(r, s)] for r, s in zip(a, b)]


def apply(a, fn):
    return [[fn(x) for x in row] for row in a]


def det(a, tower: PolyTower) -> Poly:
    """Determinant by Laplace expansion along rows, memoised on column subsets."""
    n = len(a)
    if n == 0:
        return tower.one()
    if any(len(r) != n for r in a):
        raise ValueError("determinant of a non-square matrix")

    @lru_cache(maxsize=None)
    def minor(row: int, cols: frozenset) -> Poly:
        if row == n:
            return tower.one()
        acc = tower.zero()
        ordered = sorted(cols)
        for pos, c in enumerate(ordered):
            x = a[row][c]
            if x.is_zero():
                continue
            term = x * minor(row + 1, cols - {c})
            acc = acc - term if pos % 2 else acc + term
        return acc

    return minor(0, frozenset(range(n)))


def minors(a, rows, cols, tower: PolyTower) -> Poly:
    return det([[a[i][j] for j in cols] for i in rows], tower)


def to_str(a) -> list[list[str]]:
    return [[str(x) for x in row] for row in a]
