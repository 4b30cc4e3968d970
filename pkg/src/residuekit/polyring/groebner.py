"""Buchberger's algorithm with optional cofactor tracking.

Polynomials here are plain ``{exponent tuple: coefficient}`` dicts; the term
order is a key function on exponent tuples (larger key = larger monomial).
When tracking is on, every basis element carries cofactors expressing it in
the input generators, so membership certificates come for free.
"""

from __future__ import annotations

from ..exactnum import Field

DEFAULT_PAIR_BUDGET = 50_000


class GroebnerBudgetExceeded(RuntimeError):
    pass


# term orders -------------------------------------------------------------

def lex_order(significance):
    sig = tuple(significance)

    def key(e):
        return tuple([e[i] for i in sig])
    return key


def elimination_order(eliminate, rest):
    """Degree-lex on the ``eliminate`` block, then lex on ``rest``.

    Any monomial containing an eliminated variable beats every monomial that
    does not, which is what makes elimination ideals readable off the basis.
    """
    elim = tuple(eliminate)
    rest = tuple(rest)

    def key(e):
        return (sum([e[i] for i in elim]),) + tuple([e[i] for i in elim]) + tuple([e[i] for i in rest])
    return key


# dict-polynomial helpers -------------------------------------------------

def _divides(a, b):
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def _lcm(a, b):
    return tuple([x if x > y else y for x, y in zip(a, b)])


def _sub_exp(a, b):
    return tuple([x - y for x, y in zip(a, b)])


def _add_exp(a, b):
    return tuple([x + y for x, y in zip(a, b)])


def add_into(f: dict, g: dict, mono, c, F: Field):
    """f += c * x^mono * g, in place."""
    p = F.p
    for e, v in g.items():
        e2 = tuple([x + y for x, y in zip(e, mono)]) if mono is not None else e
        w = f.get(e2, 0) + c * v
        if p:
            w %= p
        elif type(w) is not int and w.denominator == 1:
            w = w.numerator
        if w == 0:
            f.pop(e2, None)
        else:
            f[e2] = w


def mul_dict(f: dict, g: dict, F: Field) -> dict:
    out: dict = {}
    for e, c in f.items():
        add_into(out, g, e, c, F)
    return out


class _Elem:
    __slots__ = ("poly", "lm", "cof")

    def __init__(self, poly, lm, cof):
        self.poly = poly
        self.lm = lm
        self.cof = cof


def _make_monic(poly, cof, key, F):
    lm = max(poly, key=key)
    lc = poly[lm]
    if lc != 1:
        inv = F.inv(lc)
        poly = {e: F.norm(c * inv) for e, c in poly.items()}
        if cof is not None:
            cof = [{e: F.norm(c * inv) for e, c in h.items()} for h in cof]
    return _Elem(poly, lm, cof)


def reduce_full(f: dict, basis, key, F: Field, track=False):
    """Complete reduction of ``f`` by ``basis`` (list of monic _Elem).

    Returns ``(remainder, quotients)``, quotients indexed like ``basis``
    (None when not tracking).
    """
    f = dict(f)
    rem: dict = {}
    quots = [dict() for _ in basis] if track else None
    while f:
        lm = max(f, key=key)
        c = f[lm]
        for k, g in enumerate(basis):
            if _divides(g.lm, lm):
                mono = _sub_exp(lm, g.lm)
                add_into(f, g.poly, mono, F.neg(c), F)
                if track:
                    q = quots[k]
                    w = F.norm(q.get(mono, 0) + c)
                    if w == 0:
                        q.pop(mono, None)
                    else:
                        q[mono] = w
                break
        else:
            rem[lm] = c
            del f[lm]
    return rem, quots


def _combine_cofactors(quots, basis, r, F):
    out = [dict() for _ in range(r)]
    for q, g in zip(quots, basis):
        if not q:
            continue
        for j in range(r):
            if g.cof[j]:
                prod = mul_dict(q, g.cof[j], F)
                add_into(out[j], prod, None, 1, F)
    return out


def groebner(gens, key, F: Field, track=False, budget=DEFAULT_PAIR_BUDGET):
    """Reduced Groebner basis of the ideal generated by ``gens``.

    Returns ``(basis, cofactors)`` with ``basis`` a list of monic dicts sorted
    by increasing leading monomial and ``cofactors[k][j]`` the multiplier of
    ``gens[j]`` in ``basis[k]`` (None when not tracking).
    """
    r = len(gens)
    nvars = None
    G: list[_Elem] = []
    for j, g in enumerate(gens):
        if not g:
            continue
        nvars = len(next(iter(g)))
        cof = None
        if track:
            cof = [dict() for _ in range(r)]
            cof[j] = {(0,) * nvars: 1}
        G.append(_make_monic(dict(g), cof, key, F))
    if not G:
        return [], ([] if track else None)

    pairs = set()
    for i in range(len(G)):
        for j in range(i):
            pairs.add((j, i))
    done_pairs = 0

    def pair_rank(pr):
        lc = _lcm(G[pr[0]].lm, G[pr[1]].lm)
        return (sum(lc), key(lc), pr)

    while pairs:
        pr = min(pairs, key=pair_rank)
        pairs.discard(pr)
        i, j = pr
        gi, gj = G[i], G[j]
        lc = _lcm(gi.lm, gj.lm)
        # Buchberger criterion 1: coprime leading monomials
        if lc == _add_exp(gi.lm, gj.lm):
            continue
        # criterion 2 (chain): some g_k divides the lcm and both pairs with k are done
        chain = False
        for k, gk in enumerate(G):
            if k in (i, j):
                continue
            if _divides(gk.lm, lc):
                a, b = (min(i, k), max(i, k)), (min(j, k), max(j, k))
                if a not in pairs and b not in pairs:
                    chain = True
                    break
        if chain:
            continue
        done_pairs += 1
        if done_pairs > budget:
            raise GroebnerBudgetExceeded(f"more than {budget} S-pair reductions")
        mi, mj = _sub_exp(lc, gi.lm), _sub_exp(lc, gj.lm)
        s: dict = {}
        add_into(s, gi.poly, mi, 1, F)
        add_into(s, gj.poly, mj, F.neg(1), F)
        scof = None
        if track:
            scof = [dict() for _ in range(r)]
            for t in range(r):
                add_into(scof[t], gi.cof[t], mi, 1, F)
                add_into(scof[t], gj.cof[t], mj, F.neg(1), F)
        rem, quots = reduce_full(s, G, key, F, track)
        if not rem:
            continue
        if track:
            sub = _combine_cofactors(quots, G, r, F)
            for t in range(r):
                add_into(scof[t], sub[t], None, F.neg(1), F)
        new = _make_monic(rem, scof, key, F)
        n = len(G)
        G.append(new)
        for k in range(n):
            pairs.add((k, n))

    return _reduce_basis(G, key, F, track, r)


def _reduce_basis(G, key, F, track, r):
    # drop elements whose leading monomial is divisible by another's
    keep = []
    for k, g in enumerate(G):
        redundant = False
        for m, h in enumerate(G):
            if m == k:
                continue
            if _divides(h.lm, g.lm) and (h.lm != g.lm or m < k):
                redundant = True
                break
        if not redundant:
            keep.append(g)
    keep.sort(key=lambda g: key(g.lm))
    out = []
    for k, g in enumerate(keep):
        others = keep[:k] + keep[k + 1:]
        tail = dict(g.poly)
        del tail[g.lm]
        rem, quots = reduce_full(tail, others, key, F, track)
        rem[g.lm] = 1
        cof = None
        if track:
            sub = _combine_cofactors(quots, others, r, F)
            cof = [dict(c) for c in g.cof]
            for t in range(r):
                add_into(cof[t], sub[t], None, F.neg(1), F)
        out.append(_Elem(rem, g.lm, cof))
    # later elements were reduced against the unreduced earlier ones; the
    # leading monomials are unchanged, so the result is still the reduced basis
    basis = [g.poly for g in out]
    cofs = [g.cof for g in out] if track else None
    return basis, cofs


def as_elems(basis, key):
    return [_Elem(p, max(p, key=key), None) for p in basis]
