"""Top differential forms and residues of complete-intersection fractions.

A residue instance is a top form g * dx_1 ^ ... ^ dx_d over a base ring A
(the variables in blocks <= ``base`` of the tower) together with d
denominators t_1^a_1, ..., t_d^a_d whose quotient is finite over A.

Conventions:

* res[dx_1 ^ ... ^ dx_d; x_1, ..., x_d] = 1;
* the i-th wedge factor (in canonical variable order) pairs with the i-th
  denominator, so permuting denominators multiplies by the permutation sign;
* the residue obeys res[det(U) g dx; p] = res[g dx; t] whenever p = U t.

The algorithm folds exponents into generators, finds for each variable x_i a
relation p_i(x_i) in (t) monic over A, rewrites the residue over (p_1..p_d)
by the determinant rule and peels one variable at a time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .exactnum import Field
from .localcoh import GenFrac, RelationMismatch
from .polyring import (DEFAULT_MONIC_BOUND, IdealSeq, NotFiniteOverBase, Poly,
                       PolyTower, divide_monic, monic_relation)
from .polyring import matrix as pm


class InstanceError(ValueError):
    """Malformed residue instance (bad JSON shape, wrong differentials...)."""


def _perm_sign(seq) -> int:
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


@dataclass(frozen=True)
class TopForm:
    """coefficient * dx_{i_1} ^ ... ^ dx_{i_d}, stored with indices ascending."""

    coefficient: Poly
    factors: tuple  # variable indices, ascending

    @classmethod
    def make(cls, coefficient: Poly, names: Sequence[str]) -> "TopForm":
        tower = coefficient.tower
        idx = [tower.index[n] if isinstance(n, str) else n for n in names]
        if len(set(idx)) != len(idx):
            return cls(tower.zero(), tuple(sorted(set(idx))))
        sign = _perm_sign(idx)
        return cls(coefficient * sign, tuple(sorted(idx)))

    @property
    def tower(self) -> PolyTower:
        return self.coefficient.tower

    @property
    def level(self) -> int:
        return max(self.tower.block_of[i] for i in self.factors) if self.factors else 0

    @property
    def names(self) -> tuple:
        return tuple(self.tower.variables[i] for i in self.factors)

    def is_zero(self) -> bool:
        return self.coefficient.is_zero()

    def __mul__(self, c) -> "TopForm":
        return TopForm(self.coefficient * c, self.factors)

    __rmul__ = __mul__

    def __add__(self, other: "TopForm") -> "TopForm":
        if other.factors != self.factors:
            raise InstanceError("adding forms with different differentials")
        return TopForm(self.coefficient + other.coefficient, self.factors)

    def __eq__(self, other):
        if not isinstance(other, TopForm):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return True
        return self.factors == other.factors and self.coefficient == other.coefficient

    def __hash__(self):
        return hash((self.coefficient, self.factors))

    def __str__(self):
        d = "^".join("d" + n for n in self.names)
        return f"({self.coefficient})*{d}" if d else str(self.coefficient)


def wedge(first: TopForm, second: TopForm) -> TopForm:
    """first ^ second, canonicalised; repeated differentials give zero."""
    return TopForm.make(first.coefficient * second.coefficient, first.factors + second.factors)


@dataclass(frozen=True)
class ResidueInstance:
    form: TopForm
    denoms: tuple  # ((t_i, a_i), ...)
    base: int = 0
    base_change: Mapping[str, str] | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "denoms", tuple((t, int(a)) for t, a in self.denoms))
        tower = self.tower
        above = [i for i in range(tower.nvars)
                 if self.base < tower.block_of[i] <= self.form.level]
        if not self.form.is_zero() and tuple(above) != self.form.factors:
            names = [tower.variables[i] for i in above]
            raise InstanceError(f"form must carry the differentials of {names}, got {list(self.form.names)}")
        if len(self.denoms) != len(self.form.factors):
            raise InstanceError(f"need {len(self.form.factors)} denominators, got {len(self.denoms)}")
        for t, a in self.denoms:
            if a < 1:
                raise InstanceError("exponents must be positive")
            if t.tower != tower:
                raise InstanceError("denominators live in a different tower")

    @property
    def tower(self) -> PolyTower:
        return self.form.tower

    @property
    def gens(self) -> tuple:
        return tuple(t for t, _ in self.denoms)

    @property
    def exps(self) -> tuple:
        return tuple(a for _, a in self.denoms)

    def folded(self) -> tuple:
        return tuple(t ** a for t, a in self.denoms)

    def fraction(self) -> GenFrac:
        return GenFrac(self.form.coefficient, self.denoms)

    def with_coefficient(self, g: Poly) -> "ResidueInstance":
        return ResidueInstance(TopForm(g, self.form.factors), self.denoms, self.base, self.base_change)

    def to_json(self) -> dict:
        tower = self.tower
        out = {
            "field": tower.field.name,
            "base_vars": list(tower.blocks[0]),
            "blocks": [list(b) for b in tower.blocks[1:]],
            "form": {"coeff": str(self.form.coefficient), "d": list(self.form.names)},
            "denoms": [{"poly": str(t), "exp": a} for t, a in self.denoms],
        }
        if self.base:
            out["base_block"] = self.base
        if self.base_change:
            out["base_change"] = dict(self.base_change)
        return out


def tower_from_json(data: Mapping) -> PolyTower:
    try:
        F = Field.parse(data.get("field", "Q"))
        blocks = [list(data.get("base_vars", []))] + [list(b) for b in data["blocks"]]
    except (KeyError, TypeError) as exc:
        raise InstanceError(f"bad tower description: {exc}") from None
    return PolyTower(blocks, F)


def instance_from_json(data: Mapping, tower: PolyTower | None = None) -> ResidueInstance:
    """Read the instance format {"field", "base_vars", "blocks", "form", "denoms", "base_change"?}."""
    if not isinstance(data, Mapping):
        raise InstanceError("instance must be a JSON object")
    tower = tower or tower_from_json(data)
    try:
        form = data["form"]
        coeff = tower(str(form.get("coeff", "1")))
        form = TopForm.make(coeff, list(form["d"]))
        denoms = [(tower(str(d["poly"])), int(d.get("exp", 1))) for d in data["denoms"]]
    except (KeyError, TypeError, AttributeError) as exc:
        raise InstanceError(f"missing field {exc}") from None
    bc = data.get("base_change")
    return ResidueInstance(form, tuple(denoms), int(data.get("base_block", 0)),
                           {k: str(v) for k, v in bc.items()} if bc else None)


def load_instance(path) -> ResidueInstance:
    with open(path) as fh:
        return instance_from_json(json.load(fh))


# ---------------------------------------------------------------------------
# residues

def residue_monomial(g: Poly, alpha: Sequence[int], names: Sequence[str]) -> Poly:
    """res[g dx; x_1^a_1, ..., x_d^a_d]: the coefficient of x^(a-1) in g."""
    tower = g.tower
    idx = [tower.index[n] for n in names]
    return g.coefficient_in(idx, [a - 1 for a in alpha])


def _main_variable(p: Poly) -> int:
    return max(p.used_indices(), key=lambda i: (p.tower.block_of[i], i))


def residue_univariate(h: Poly, p: Poly, var: str | None = None) -> Poly:
    """res[h dx; p(x)] for p monic in x over the coefficients: x^(deg p - 1) coefficient of h mod p."""
    vi = p.tower.index[var] if var is not None else _main_variable(p)
    n = p.degree(vi)
    _, rem = divide_monic(h, p, vi)
    e = [0] * p.tower.nvars
    out = {}
    for ex, c in rem.terms.items():
        if ex[vi] == n - 1:
            e = list(ex)
            e[vi] = 0
            out[tuple(e)] = c
    return Poly(p.tower, out)


@dataclass(frozen=True)
class Reduction:
    """The monic data used by one run of the algorithm (for inspection and tests)."""

    monics: tuple  # p_i, one per form variable
    matrix: tuple  # rows U_i with p_i = sum_j U_ij t_j (folded t)
    det: Poly


def monic_reduction(inst: ResidueInstance, bound: int = DEFAULT_MONIC_BOUND,
                    degree_floor: Mapping[str, int] | int | None = None) -> Reduction:
    tower = inst.tower
    ideal = IdealSeq(inst.folded())
    rows, monics = [], []
    for vi in inst.form.factors:
        name = tower.variables[vi]
        floor = degree_floor.get(name) if isinstance(degree_floor, Mapping) else degree_floor
        p, coeffs = monic_relation(ideal, name, base=inst.base, bound=bound, degree_floor=floor)
        monics.append(p)
        rows.append(tuple(coeffs))
    U = [list(r) for r in rows]
    return Reduction(tuple(monics), tuple(rows), pm.det(U, tower))


def residue(inst: ResidueInstance, bound: int = DEFAULT_MONIC_BOUND,
            degree_floor: Mapping[str, int] | int | None = None) -> Poly:
    """Exact residue in A (a polynomial in the variables of blocks <= base)."""
    if inst.form.is_zero():
        return inst.tower.zero()
    red = monic_reduction(inst, bound, degree_floor)
    return apply_reduction(red, inst, inst.form.coefficient)


def apply_reduction(red: Reduction, inst: ResidueInstance, g: Poly) -> Poly:
    """res[g dx; t] for the denominators of ``inst`` using precomputed monic data."""
    h = red.det * g
    # p_i lies in A[x_i]; reducing by each in turn and reading off the top
    # coefficient peels one variable at a time
    for vi, p in zip(inst.form.factors, red.monics):
        if h.is_zero():
            break
        h = residue_univariate(h, p, inst.tower.variables[vi])
    _check_in_base(h, inst.base)
    return h


def residue_functional(t: Sequence[Poly], base: int = 0, exps: Sequence[int] | None = None,
                       bound: int = DEFAULT_MONIC_BOUND):
    """g |-> res[g dx; t^exps], with the monic reduction computed once."""
    tower = t[0].tower
    exps = exps or [1] * len(t)
    inst = ResidueInstance(top_form(tower, base), tuple(zip(t, exps)), base)
    red = monic_reduction(inst, bound)
    return lambda g: apply_reduction(red, inst, tower(g))


def _check_in_base(h: Poly, base: int) -> None:
    if not h.is_zero() and h.max_block() > base:
        raise AssertionError(f"residue {h} is not in the base ring")


def residue_of(coeff, names: Sequence[str], denoms, tower: PolyTower, base: int = 0, **kw) -> Poly:
    """Convenience front end: residue of coeff*d(names) over [(poly, exp), ...] given as text or Poly."""
    form = TopForm.make(tower(coeff), names)
    dens = tuple((tower(t), a) for t, a in denoms)
    return residue(ResidueInstance(form, dens, base), **kw)


def top_form(tower: PolyTower, base: int = 0, level: int | None = None, coeff=1) -> TopForm:
    """coeff * dx over all variables of blocks base+1..level (default: the top block)."""
    level = len(tower.blocks) - 1 if level is None else level
    idx = [i for i in range(tower.nvars) if base < tower.block_of[i] <= level]
    return TopForm(tower(coeff), tuple(idx))


# ---------------------------------------------------------------------------
# trace and duality for B = R/(t) finite free over A

def trace_tau(t: Sequence[Poly], nu: TopForm, b: Poly, base: int = 0,
              bound: int = DEFAULT_MONIC_BOUND) -> Poly:
    """tau(b * nu (x) 1/t), defined as the residue of b * nu over t."""
    return residue(ResidueInstance(nu * b, tuple((g, 1) for g in t), base), bound)


def staircase_basis(t: Sequence[Poly], base: int = 0) -> list[Poly]:
    """Monomial A-basis of B = R/(t) read off a Groebner staircase.

    Raises NotFiniteOverBase if some variable has no pure-power leading
    monomial, and ValueError if a leading coefficient over A is not a unit
    (B might then not be free with a monomial basis).
    """
    tower = t[0].tower
    ideal = IdealSeq(t)
    top = [i for i in range(tower.nvars) if tower.block_of[i] > base]
    basis = ideal.groebner_polys()
    leads = []
    for g in basis:
        top_part = max((tuple(e[i] for i in top) for e in g.terms),
                       key=lambda e: tower.sort_key(_embed(e, top, tower.nvars)))
        lead_coeff = {e: c for e, c in g.terms.items() if tuple(e[i] for i in top) == top_part}
        if len(lead_coeff) != 1 or any(e[i] for e in lead_coeff for i in range(tower.nvars) if i not in top):
            raise ValueError(f"leading coefficient of {g} over the base is not a unit")
        leads.append(top_part)
    for k, i in enumerate(top):
        if not any(l[k] > 0 and sum(l) == l[k] for l in leads):
            raise NotFiniteOverBase(tower.variables[i], "not-finite")
    out = []
    bounds = [max(l[k] for l in leads if sum(l) == l[k] and l[k] > 0) for k in range(len(top))]

    def rec(k, cur):
        if k == len(top):
            if not any(all(c >= l_ for c, l_ in zip(cur, l)) for l in leads):
                out.append(tuple(cur))
            return
        for a in range(bounds[k]):
            rec(k + 1, cur + [a])

    rec(0, [])
    out.sort(key=lambda e: (sum(e), tuple(reversed(e))))
    return [Poly(tower, {_embed(e, top, tower.nvars): 1}) for e in out]


def _embed(e, idx, n):
    out = [0] * n
    for i, a in zip(idx, e):
        out[i] = a
    return tuple(out)


@dataclass(frozen=True)
class Pairing:
    basis: tuple
    matrix: tuple
    det: Poly
    perfect: bool


def duality_pairing_perfect(t: Sequence[Poly], basis: Sequence[Poly] | None = None,
                            base: int = 0, bound: int = DEFAULT_MONIC_BOUND) -> Pairing:
    """The pairing (b_i, b_j dx) |-> tau(b_i b_j dx (x) 1/t) on a basis of B.

    It is perfect when the determinant of the pairing matrix is a unit of A,
    that is a nonzero constant.
    """
    t = list(t)
    tower = t[0].tower
    basis = list(basis) if basis is not None else staircase_basis(t, base)
    res = residue_functional(t, base, bound=bound)
    mat = [[res(bi * bj) for bj in basis] for bi in basis]
    d = pm.det(mat, tower)
    return Pairing(tuple(basis), tuple(tuple(r) for r in mat), d, d.is_constant() and not d.is_zero())


# ---------------------------------------------------------------------------
# base change

def specialized_tower(tower: PolyTower, images: Mapping[str, object]) -> PolyTower:
    """The tower with the substituted base variables removed."""
    for v in images:
        if v not in tower.index:
            raise InstanceError(f"unknown variable {v!r} in base change")
        if tower.block_of[tower.index[v]] != 0:
            raise InstanceError(f"base change must act on base variables, not {v}")
    blocks = [[v for v in tower.blocks[0] if v not in images]] + [list(b) for b in tower.blocks[1:]]
    return PolyTower(blocks, tower.field)


def specialize_instance(inst: ResidueInstance, images: Mapping[str, object],
                        target: PolyTower | None = None) -> ResidueInstance:
    target = target or specialized_tower(inst.tower, images)
    sub = {k: (v if isinstance(v, Poly) else target(str(v))) for k, v in images.items()}
    form = TopForm.make(inst.form.coefficient.subs(sub, target), inst.form.names)
    denoms = tuple((t.subs(sub, target), a) for t, a in inst.denoms)
    return ResidueInstance(form, denoms, inst.base)


def base_change_residue(inst: ResidueInstance, images: Mapping[str, object] | None = None,
                        bound: int = DEFAULT_MONIC_BOUND) -> tuple:
    """(sigma(res), res(sigma)) for sigma: A -> A' given by images of base variables."""
    images = images if images is not None else (inst.base_change or {})
    target = specialized_tower(inst.tower, images)
    sub = {k: (v if isinstance(v, Poly) else target(str(v))) for k, v in images.items()}
    left = residue(inst, bound).subs(sub, target)
    right = residue(specialize_instance(inst, sub, target), bound)
    return left, right


__all__ = [
    "InstanceError", "NotFiniteOverBase", "RelationMismatch", "TopForm", "wedge",
    "ResidueInstance", "instance_from_json", "load_instance", "tower_from_json",
    "residue_monomial", "residue_univariate", "residue", "residue_of", "monic_reduction",
    "apply_reduction", "residue_functional",
    "top_form", "trace_tau", "staircase_basis", "duality_pairing_perfect", "Pairing",
    "base_change_residue", "specialize_instance", "specialized_tower",
]
