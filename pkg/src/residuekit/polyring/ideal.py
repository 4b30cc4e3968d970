"""Ideals given by generator sequences: normal forms, membership, monic relations."""

from __future__ import annotations

import threading
from typing import Sequence

from . import groebner as gb
from .poly import Poly, PolyTower, TowerMismatch

DEFAULT_MONIC_BOUND = 32


class NotMember(ValueError):
    pass


class NotFiniteOverBase(ArithmeticError):
    """No polynomial monic in ``var`` lies in the ideal (up to ``bound``).

    ``reason`` is "not-finite" when no monic relation exists at any degree and
    "bound" when one exists but its degree exceeds the configured bound.
    """

    def __init__(self, var: str, reason: str, degree: int | None = None, bound: int | None = None):
        self.var = var
        self.reason = reason
        self.degree = degree
        self.bound = bound
        if reason == "bound":
            msg = (f"variable {var}: minimal monic relation has degree {degree}, "
                   f"above the bound {bound}")
        else:
            msg = f"variable {var}: quotient is not finite over the base (no monic relation in {var})"
        super().__init__(msg)


class IdealSeq:
    """An ordered generator sequence t = (t_1, ..., t_r) with cached bases."""

    def __init__(self, gens: Sequence[Poly], budget: int = gb.DEFAULT_PAIR_BUDGET):
        gens = tuple(gens)
        if not gens:
            raise ValueError("an ideal sequence needs at least one generator")
        tower = gens[0].tower
        for g in gens:
            if g.tower != tower:
                raise TowerMismatch("all generators must share a tower")
        self.gens = gens
        self.tower = tower
        self.budget = budget
        self._cache: dict = {}
        self._lock = threading.Lock()

    def __len__(self):
        return len(self.gens)

    def __iter__(self):
        return iter(self.gens)

    def __getitem__(self, i):
        return self.gens[i]

    def __repr__(self):
        return "IdealSeq(" + ", ".join(str(g) for g in self.gens) + ")"

    def _basis(self, order_name, key, track):
        cache_key = (order_name, track)
        hit = self._cache.get(cache_key)
        if hit is not None:
            return hit
        basis, cofs = gb.groebner([g.terms for g in self.gens], key, self.tower.field,
                                  track=track, budget=self.budget)
        result = (basis, cofs, gb.as_elems(basis, key))
        with self._lock:
            self._cache[cache_key] = result
        return result

    def groebner_basis(self, track=False):
        """Reduced basis for the tower's block-major lex order."""
        key = self.tower.sort_key
        return self._basis("tower", key, track)

    def groebner_polys(self) -> list[Poly]:
        basis, _, _ = self.groebner_basis()
        return [Poly(self.tower, b) for b in basis]


def _same_tower(f: Poly, I: IdealSeq):
    if f.tower != I.tower:
        raise TowerMismatch("polynomial and ideal live in different towers")


def normal_form(f: Poly, I: IdealSeq) -> Poly:
    _same_tower(f, I)
    _, _, elems = I.groebner_basis()
    rem, _ = gb.reduce_full(f.terms, elems, I.tower.sort_key, I.tower.field)
    return Poly(I.tower, rem)


def ideal_member(f: Poly, I: IdealSeq) -> bool:
    return normal_form(f, I).is_zero()


def express_in_generators(f: Poly, I: IdealSeq) -> list[Poly]:
    """Coefficients (c_1, ..., c_r) with f = sum c_j t_j, checked by expansion."""
    _same_tower(f, I)
    tower = I.tower
    F = tower.field
    _, cofs, elems = I.groebner_basis(track=True)
    rem, quots = gb.reduce_full(f.terms, elems, tower.sort_key, F, track=True)
    if rem:
        raise NotMember(f"{f} is not in the ideal {I!r}")
    r = len(I.gens)
    coeffs = [dict() for _ in range(r)]
    for q, cof in zip(quots, cofs):
        if not q:
            continue
        for j in range(r):
            if cof[j]:
                gb.add_into(coeffs[j], gb.mul_dict(q, cof[j], F), None, 1, F)
    out = [Poly(tower, c) for c in coeffs]
    _check_expansion(f, out, I.gens)
    return out


def _check_expansion(f, coeffs, gens):
    total = f.tower.zero()
    for c, g in zip(coeffs, gens):
        total = total + c * g
    if total != f:
        raise AssertionError(f"division certificate failed for {f}")


def _resolve_base(tower: PolyTower, var: str, base: int | None) -> int:
    if var not in tower.index:
        raise ValueError(f"unknown variable {var!r}")
    blk = tower.block_of[tower.index[var]]
    if base is None:
        base = blk - 1
    if blk <= base:
        raise ValueError(f"variable {var} lies in the base (block {blk} <= {base})")
    return base


def monic_relation(I: IdealSeq, var: str, base: int | None = None,
                   bound: int = DEFAULT_MONIC_BOUND, degree_floor: int | None = None):
    """Minimal-degree p in (I), monic in ``var`` over the blocks <= ``base``.

    Returns ``(p, coeffs)`` with p = sum coeffs[j] * I.gens[j].  With
    ``degree_floor`` the returned relation is var^k - (var^k mod p_min) for
    the smallest k >= degree_floor: a different, still monic, element of (I).
    """
    tower = I.tower
    F = tower.field
    base = _resolve_base(tower, var, base)
    vi = tower.index[var]
    base_idx = [i for i in tower.order if tower.block_of[i] <= base]
    elim = [i for i in tower.order if tower.block_of[i] > base and i != vi]
    key = gb.elimination_order(elim, [vi] + base_idx)
    basis, cofs, _ = I._basis(("elim", vi, base), key, True)
    best = None
    for poly, cof in zip(basis, cofs):
        lm = max(poly, key=key)
        if lm[vi] > 0 and sum(lm) == lm[vi]:
            if best is None or lm[vi] < best[0]:
                best = (lm[vi], poly, cof)
    if best is None:
        raise NotFiniteOverBase(var, "not-finite")
    deg, poly, cof = best
    if deg > bound:
        raise NotFiniteOverBase(var, "bound", degree=deg, bound=bound)
    p = Poly(tower, poly)
    coeffs = [Poly(tower, c) for c in cof]
    if degree_floor is not None and degree_floor > deg:
        k = degree_floor
        if k > bound:
            raise NotFiniteOverBase(var, "bound", degree=k, bound=bound)
        quotient, _ = divide_monic(tower.var(var) ** k, p, vi)
        p = quotient * p
        coeffs = [quotient * c for c in coeffs]
    _check_expansion(p, coeffs, I.gens)
    return p, coeffs


def find_monic(I: IdealSeq, var: str, bound: int = DEFAULT_MONIC_BOUND,
               base: int | None = None, degree_floor: int | None = None) -> Poly:
    return monic_relation(I, var, base=base, bound=bound, degree_floor=degree_floor)[0]


def divide_monic(f: Poly, p: Poly, vi: int):
    """Division of f by p, monic in variable index ``vi``: returns (q, r), deg_vi r < deg_vi p."""
    n = p.degree(vi)
    lead = [e for e in p.terms if e[vi] == n]
    if len(lead) != 1 or any(a for i, a in enumerate(lead[0]) if i != vi) or p.terms[lead[0]] != 1:
        raise ValueError(f"{p} is not monic in {p.tower.variables[vi]}")
    tower = f.tower
    F = tower.field
    q: dict = {}
    r = dict(f.terms)
    while True:
        top = [e for e in r if e[vi] >= n]
        if not top:
            break
        e = max(top, key=lambda e: (e[vi], tower.sort_key(e)))
        c = r[e]
        mono = list(e)
        mono[vi] -= n
        mono = tuple(mono)
        q[mono] = F.norm(q.get(mono, 0) + c)
        gb.add_into(r, p.terms, mono, F.neg(c), F)
    return Poly(tower, {e: c for e, c in q.items() if c != 0}), Poly(tower, r)
