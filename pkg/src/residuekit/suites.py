"""Seeded randomized verification suites.

Every case draws from its own generator seeded by (suite, seed, index), so a
single case can be replayed without running the ones before it.  Coefficients
come from {-3..3} minus {0}.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from . import koszul, localcoh
from .exactnum import QQ, Field, mat_rank
from .fubini import TowerResidueInstance, verify_fubini, verify_fubini_series
from .localcoh import GenFrac, NestedFrac
from .polyring import IdealSeq, NotFiniteOverBase, Poly, PolyTower, ideal_member
from .polyring import matrix as pm
from .residue import (ResidueInstance, TopForm, base_change_residue, duality_pairing_perfect,
                      monic_reduction, residue, residue_functional, residue_monomial,
                      staircase_basis)

COEFFS = (-3, -2, -1, 1, 2, 3)


@dataclass
class SuiteConfig:
    field: Field = QQ
    degree_bound: int = 6
    monic_bound: int = 32


@dataclass
class CaseResult:
    index: int
    passed: bool
    instance: dict
    result: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"index": self.index, "passed": self.passed,
                "instance": self.instance, "result": self.result}


def case_rng(suite: str, seed: int, index: int) -> random.Random:
    return random.Random(f"{suite}:{seed}:{index}")


def coeff(rng) -> int:
    return rng.choice(COEFFS)


def random_monomial(rng, nvars: int, idx, deg: int) -> tuple:
    e = [0] * nvars
    for _ in range(deg):
        e[rng.choice(idx)] += 1
    return tuple(e)


def random_poly(rng, tower: PolyTower, idx, max_deg: int, nterms: int, min_deg: int = 0) -> Poly:
    """Sparse polynomial in the variables ``idx`` with total degree in [min_deg, max_deg]."""
    terms = {}
    for _ in range(nterms):
        e = random_monomial(rng, tower.nvars, idx, rng.randint(min_deg, max_deg)) if idx else tower.zero_exp
        terms[e] = coeff(rng)
    return Poly.from_terms(tower, terms.items())


def monic_in(rng, tower: PolyTower, var: int, deg: int, coeff_idx, coeff_deg: int, nterms: int = 2) -> Poly:
    """x^deg + lower terms in x with coefficients in the variables ``coeff_idx``."""
    e = [0] * tower.nvars
    e[var] = deg
    p = Poly(tower, {tuple(e): 1})
    for _ in range(nterms):
        k = rng.randint(0, deg - 1)
        c = random_poly(rng, tower, coeff_idx, coeff_deg, 1)
        x = [0] * tower.nvars
        x[var] = k
        p = p + c * Poly(tower, {tuple(x): 1})
    return p


def _tower(blocks, config: SuiteConfig) -> PolyTower:
    return PolyTower(blocks, config.field)


def _finite(inst: ResidueInstance, config: SuiteConfig) -> bool:
    try:
        monic_reduction(inst, config.monic_bound)
        return True
    except NotFiniteOverBase:
        return False


# ---------------------------------------------------------------------------
# determinant law: res[det(U) nu; U g] = res[nu; g] for monomial g

def case_denom(rng, config: SuiteConfig) -> CaseResult:
    r = rng.choice([1, 2])
    names = ["u", "v"][:r]
    tower = _tower([[], names], config)
    idx = list(range(r))
    entry_deg = min(3, config.degree_bound)
    alpha = [rng.randint(1, 2) for _ in range(r)]
    g = [tower.var(n) ** a for n, a in zip(names, alpha)]
    nu = random_poly(rng, tower, idx, config.degree_bound, rng.randint(1, 4))
    # make the monomial-denominator residue nonzero so the law is not checked on 0 = 0
    nu = nu + Poly.from_terms(tower, [(tuple(a - 1 for a in alpha), coeff(rng))])
    for _ in range(50):
        U = [[random_poly(rng, tower, idx, entry_deg, rng.randint(1, 2)) for _ in range(r)] for _ in range(r)]
        det = pm.det(U, tower)
        if det.is_zero():
            continue
        t = [sum((U[i][j] * g[j] for j in range(r)), tower.zero()) for i in range(r)]
        if any(x.is_zero() for x in t):
            continue
        lhs_inst = ResidueInstance(TopForm.make(det * nu, names), tuple((x, 1) for x in t))
        if _finite(lhs_inst, config):
            break
    else:
        raise RuntimeError("could not draw a finite determinant-law instance")
    lhs = residue(lhs_inst, config.monic_bound)
    rhs_inst = ResidueInstance(TopForm.make(nu, names), tuple((x, 1) for x in g))
    rhs = residue(rhs_inst, config.monic_bound)
    oracle = residue_monomial(nu, alpha, names)
    instance = {"g": rhs_inst.to_json(), "U": pm.to_str(U), "t": [str(x) for x in t]}
    return CaseResult(0, lhs == rhs == oracle, instance,
                      {"lhs": str(lhs), "rhs": str(rhs), "monomial": str(oracle)})


# ---------------------------------------------------------------------------
# iterated residues

def draw_tower_instance(rng, config: SuiteConfig, monomial: bool | None = None) -> TowerResidueInstance:
    tower = _tower([[], ["u"], ["v"]], config)
    u, v = tower.index["u"], tower.index["v"]
    monomial = rng.random() < 0.5 if monomial is None else monomial
    alpha, beta = rng.randint(1, 3), rng.randint(1, 3)
    h = random_poly(rng, tower, [u, v], config.degree_bound, rng.randint(1, 5))
    m = tower.const(coeff(rng)) + random_poly(rng, tower, [u], 2, rng.randint(1, 2), min_deg=1)
    h = h + Poly.from_terms(tower, [((alpha - 1, beta - 1), coeff(rng))])
    if monomial:
        t, g = tower.var("u"), tower.var("v")
    else:
        t = monic_in(rng, tower, u, rng.randint(1, 2), [], 0)
        g = monic_in(rng, tower, v, rng.randint(1, 2), [u], 1)
    return TowerResidueInstance(TopForm.make(m, ["u"]), TopForm.make(h, ["v"]),
                                ((t, alpha),), ((g, beta),))


def case_fubini(rng, config: SuiteConfig) -> CaseResult:
    inst = draw_tower_instance(rng, config)
    rep = verify_fubini(inst, config.monic_bound)
    return CaseResult(0, rep.equal, inst.to_json(), rep.as_dict())


def case_fubini_series(rng, config: SuiteConfig) -> CaseResult:
    inst = draw_tower_instance(rng, config, monomial=True)
    rep = verify_fubini_series(inst, None, config.monic_bound)
    return CaseResult(0, rep.equal, inst.to_json(), rep.as_dict())


# ---------------------------------------------------------------------------
# Leray isomorphism and the cocycle chase

def case_leray(rng, config: SuiteConfig) -> CaseResult:
    d, e = rng.randint(1, 2), rng.randint(1, 2)
    us = [f"u{i + 1}" for i in range(d)]
    vs = [f"v{j + 1}" for j in range(e)]
    tower = _tower([[], us, vs], config)
    uidx = [tower.index[n] for n in us]
    vidx = [tower.index[n] for n in vs]
    outer = [monic_in(rng, tower, i, rng.randint(1, 2), [], 0, 1) for i in uidx]
    inner = [monic_in(rng, tower, j, rng.randint(1, 2), uidx, 1, 1) for j in vidx]
    alpha = [rng.randint(1, 2) for _ in uidx]
    beta = [rng.randint(1, 2) for _ in vidx]
    m = random_poly(rng, tower, uidx, 2, rng.randint(1, 2))
    n = random_poly(rng, tower, uidx + vidx, 3, rng.randint(1, 3))
    x = GenFrac.make(m * n, inner + outer, beta + alpha)
    y = localcoh.leray_iso(x, split=(m, n), inner_count=e)
    round_trip = localcoh.frac_equal(localcoh.leray_iso_inv(y), x)
    back = localcoh.leray_iso(localcoh.leray_iso_inv(y), split=(m, n), inner_count=e)
    inverse_trip = localcoh.nested_equal(back, y)
    east_south, south_east = localcoh.cocycle_chase(m, n, inner, beta, outer, alpha)
    sign = -1 if (d + e) % 2 else 1
    expected = NestedFrac(m * sign, GenFrac.make(n, inner, beta), tuple(zip(outer, alpha)))
    chase = localcoh.nested_equal(east_south, expected) and localcoh.nested_equal(south_east, expected)
    instance = {"blocks": [us, vs], "field": tower.field.name, "m": str(m), "n": str(n),
                "inner": [[str(g), b] for g, b in zip(inner, beta)],
                "outer": [[str(t), a] for t, a in zip(outer, alpha)]}
    return CaseResult(0, round_trip and inverse_trip and chase, instance,
                      {"nested": str(y), "round_trip": round_trip, "inverse_round_trip": inverse_trip,
                       "chase_sign": sign, "chase": chase})


# ---------------------------------------------------------------------------
# sign conventions, r = 1, 2, 3 in rotation

def case_signs(rng, config: SuiteConfig, index: int = 0) -> CaseResult:
    r = index % 3 + 1
    names = ["x", "y", "z"][:r]
    tower = _tower([[], names], config)
    idx = list(range(r))
    t = [tower.var(n) + random_poly(rng, tower, idx, 2, 1, min_deg=2) for n in names]
    alpha = [rng.randint(1, 3) for _ in range(r)]
    m = random_poly(rng, tower, idx, 3, rng.randint(1, 3))
    sign = -1 if r % 2 else 1
    checks = {}
    bracket = GenFrac.make(m, t, alpha)
    brace = localcoh.variant_convert(bracket)
    checks["bracket_brace"] = (brace.variant == localcoh.BRACE and brace.numerator == m * sign
                               and localcoh.variant_convert(brace) == bracket)
    checks["khmap"] = localcoh.khmap(m, t, alpha) == GenFrac.make(m * sign, t, alpha)
    lam_sign, symbol = koszul.lambda_t(t)
    checks["lambda"] = lam_sign == sign and symbol.gens == tuple(t)
    checks["fli"] = koszul.fli_to_fraction(m, t) == GenFrac.make(m, t)
    e_, d_ = rng.randint(0, 3), rng.randint(0, 3)
    comp = koszul.module_shift_composite(koszul.module_complex(tower, rng.randint(1, 2)),
                                         koszul.module_complex(tower, rng.randint(1, 2)), e_, d_)
    checks["shift_composite"] = koszul.is_identity_map(comp) and comp.commutes()
    instance = {"r": r, "field": tower.field.name, "t": [str(x) for x in t], "alpha": alpha,
                "m": str(m), "e": e_, "d": d_}
    return CaseResult(0, all(checks.values()), instance, checks)


# ---------------------------------------------------------------------------
# base change s |-> c

def case_basechange(rng, config: SuiteConfig) -> CaseResult:
    r = rng.choice([1, 2])
    names = ["u", "v"][:r]
    tower = _tower([["s"], names], config)
    s = tower.index["s"]
    idx = [tower.index[n] for n in names]
    t = [monic_in(rng, tower, idx[0], rng.randint(1, 3), [s], 1)]
    if r == 2:
        t.append(monic_in(rng, tower, idx[1], rng.randint(1, 2), [s, idx[0]], 1))
    exps = tuple(rng.randint(1, 2) for _ in range(r))
    g = random_poly(rng, tower, [s] + idx, config.degree_bound, rng.randint(1, 4))
    top = [0] * tower.nvars
    for i, x, a in zip(idx, t, exps):
        top[i] = x.degree(i) * a - 1
    g = g + Poly.from_terms(tower, [(tuple(top), coeff(rng))])
    c = rng.randint(-5, 5)
    inst = ResidueInstance(TopForm.make(g, names), tuple(zip(t, exps)), 0, {"s": str(c)})
    left, right = base_change_residue(inst, None, config.monic_bound)
    return CaseResult(0, left == right, inst.to_json(), {"sigma_res": str(left), "res_sigma": str(right)})


# ---------------------------------------------------------------------------
# duality pairing on finite free complete intersections

def draw_ci_algebra(rng, config: SuiteConfig, over_s: bool) -> list[Poly]:
    r = rng.choice([1, 2])
    names = ["u", "v"][:r]
    tower = _tower([["s"] if over_s else [], names], config)
    cidx = [tower.index["s"]] if over_s else []
    idx = [tower.index[n] for n in names]
    if r == 1:
        return [monic_in(rng, tower, idx[0], rng.randint(1, 6), cidx, 1)]
    a = rng.randint(1, 3)
    b = rng.randint(1, 6 // a)
    return [monic_in(rng, tower, idx[0], a, cidx, 1),
            monic_in(rng, tower, idx[1], b, cidx + [idx[0]], 1)]


def case_duality(rng, config: SuiteConfig, index: int = 0) -> CaseResult:
    t = draw_ci_algebra(rng, config, over_s=bool(index % 2))
    pairing = duality_pairing_perfect(t, None, 0, config.monic_bound)
    tower = t[0].tower
    instance = {"field": tower.field.name, "base_vars": list(tower.blocks[0]),
                "blocks": [list(b) for b in tower.blocks[1:]], "t": [str(x) for x in t]}
    return CaseResult(0, pairing.perfect, instance,
                      {"rank": len(pairing.basis), "basis": [str(b) for b in pairing.basis],
                       "det": str(pairing.det)})


# ---------------------------------------------------------------------------
# Koszul exactness on homogeneous regular sequences

def case_koszul(rng, config: SuiteConfig, bound: int = 8) -> CaseResult:
    n = rng.randint(1, 3)
    names = ["x", "y", "z"][:n]
    tower = _tower([[], names], config)
    r = rng.randint(1, n)
    if rng.random() < 0.5:
        kind = "monomial"
        chosen = rng.sample(range(n), r)
        t = [tower.var(names[i]) ** rng.randint(1, 3) for i in chosen]
        degrees = [x.degree() for x in t]
    else:
        kind = "linear"
        while True:
            rows = [[rng.choice(COEFFS + (0,)) for _ in range(n)] for _ in range(r)]
            if mat_rank(rows, config.field) == r:
                break
        t = [Poly.from_terms(tower, ((tuple(int(k == i) for k in range(n)), c)
                                     for i, c in enumerate(row) if c)) for row in rows]
        degrees = [1] * r
    C = koszul.koszul_cochain(t)
    coh = koszul.graded_cohomology(C, bound)
    oracle = koszul.hilbert_function_ci(n, degrees, bound)
    low_vanish = all(coh.vanishes(i) for i in range(r))
    top = [coh.at(r, k) for k in range(bound + 1)]
    instance = {"field": tower.field.name, "vars": names, "kind": kind, "t": [str(x) for x in t]}
    return CaseResult(0, low_vanish and top == oracle, instance,
                      {"H_top": top, "oracle": oracle, "lower_vanish": low_vanish,
                       "certified_by": coh.certified_by})


# ---------------------------------------------------------------------------
# path independence: two different monic targets, same residue

def case_path(rng, config: SuiteConfig) -> CaseResult:
    r = rng.choice([1, 2])
    names = ["u", "v"][:r]
    tower = _tower([[], names], config)
    idx = list(range(r))
    while True:
        t = [tower.var(n) ** rng.randint(1, 2) + random_poly(rng, tower, idx, 2, rng.randint(1, 2))
             for n in names]
        g = random_poly(rng, tower, idx, config.degree_bound, rng.randint(1, 4))
        g = g + random_poly(rng, tower, idx, 3, 2)
        inst = ResidueInstance(TopForm.make(g, names),
                               tuple((x, rng.randint(1, 2)) for x in t))
        if _finite(inst, config):
            break
    first = monic_reduction(inst, config.monic_bound)
    floors = {n: p.degree(tower.index[n]) + rng.randint(1, 2) for n, p in zip(names, first.monics)}
    second = monic_reduction(inst, config.monic_bound + 2, floors)
    a = residue(inst, config.monic_bound)
    b = residue(inst, config.monic_bound + 2, floors)
    distinct = all(p != q for p, q in zip(first.monics, second.monics))
    return CaseResult(0, distinct and a == b, inst.to_json(),
                      {"default": str(a), "alternate": str(b), "floors": floors,
                       "targets": [[str(p), str(q)] for p, q in zip(first.monics, second.monics)]})


# ---------------------------------------------------------------------------
# fraction calculus: multiplication rule and vanishing

def draw_regular_sequence(rng, tower: PolyTower, idx) -> list[Poly]:
    """Homogeneous t with R/(t) finite (r = number of variables), hence regular."""
    r = len(idx)
    while True:
        t = []
        for _ in range(r):
            deg = rng.randint(1, 2)
            t.append(random_poly(rng, tower, idx, deg, rng.randint(1, 3), min_deg=deg))
        if any(x.is_zero() for x in t):
            continue
        ideal = IdealSeq(t)
        leads = [max(b.terms, key=tower.sort_key) for b in ideal.groebner_polys()]
        if all(any(e[i] > 0 and sum(e) == e[i] for e in leads) for i in idx):
            return t


def case_fraction(rng, config: SuiteConfig) -> CaseResult:
    r = rng.choice([1, 2])
    names = ["u", "v"][:r]
    tower = _tower([[], names], config)
    idx = list(range(r))
    t = draw_regular_sequence(rng, tower, idx)
    alpha = [rng.randint(1, 2) for _ in range(r)]
    m = random_poly(rng, tower, idx, 4, rng.randint(1, 3))
    i = rng.randrange(r)
    raised = list(alpha)
    raised[i] += 1
    lhs = GenFrac.make(t[i] * m, t, raised)
    rhs = GenFrac.make(m, t, alpha)
    mult_rule = localcoh.frac_equal(lhs, rhs)
    powers = [x ** a for x, a in zip(t, alpha)]
    if rng.random() < 0.5:
        # an element of the ideal, possibly disguised
        num = sum((random_poly(rng, tower, idx, 2, 2) * p for p in powers), tower.zero())
    else:
        num = m
    frac = GenFrac.make(num, t, alpha)
    member = ideal_member(num, IdealSeq(powers))
    vanishes = localcoh.is_zero(frac)
    # independent witness: the class vanishes iff it pairs to zero with R/(t^alpha)
    res = residue_functional(t, 0, alpha, config.monic_bound)
    basis = staircase_basis(powers)
    pairing_zero = all(res(num * b).is_zero() for b in basis)
    passed = mult_rule and vanishes == member and pairing_zero == member
    instance = {"field": tower.field.name, "vars": names, "t": [str(x) for x in t], "alpha": alpha,
                "m": str(m), "i": i, "numerator": str(num)}
    return CaseResult(0, passed, instance, {"multiplication_rule": mult_rule, "member": member,
                                            "vanishes": vanishes, "pairing_zero": pairing_zero})


# ---------------------------------------------------------------------------

def _indexed(fn):
    return lambda rng, config, index: fn(rng, config, index)


def _plain(fn):
    return lambda rng, config, index: fn(rng, config)


SUITES: dict[str, Callable] = {
    "denom": _plain(case_denom),
    "fubini": _plain(case_fubini),
    "fubini-series": _plain(case_fubini_series),
    "leray": _plain(case_leray),
    "signs": _indexed(case_signs),
    "basechange": _plain(case_basechange),
    "duality": _indexed(case_duality),
    "koszul": _plain(case_koszul),
    "path": _plain(case_path),
    "fraction": _plain(case_fraction),
}


def run_case(suite: str, seed: int, index: int, config: SuiteConfig | None = None) -> CaseResult:
    config = config or SuiteConfig()
    res = SUITES[suite](case_rng(suite, seed, index), config, index)
    res.index = index
    return res


def run_suite(suite: str, seed: int, count: int, config: SuiteConfig | None = None) -> list[CaseResult]:
    if suite not in SUITES:
        raise KeyError(suite)
    return [run_case(suite, seed, k, config) for k in range(count)]
