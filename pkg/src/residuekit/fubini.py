"""Iterated residues over a tower A -> R = A[u] -> S = R[v].

chi(mu (x) nu) = nu ^ mu, and the iterated residue identity

    res[ res[nu; v^beta] * mu; u^alpha ] = res[ nu ^ mu; v^beta, u^alpha ]

is checked exactly.  The inner residue is taken over R (base block 1), the
outer one over A (base block 0).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping

from .polyring import DEFAULT_MONIC_BOUND, Poly, PolyTower
from .residue import (InstanceError, ResidueInstance, TopForm, instance_from_json,
                      residue, tower_from_json, wedge)


def chi_wedge(mu: TopForm, nu: TopForm) -> TopForm:
    """chi(mu (x) nu) = nu ^ mu in canonical order."""
    if mu.factors and nu.factors and max(mu.factors) >= min(nu.factors):
        tower = mu.tower
        if max(tower.block_of[i] for i in mu.factors) >= min(tower.block_of[i] for i in nu.factors):
            raise InstanceError("mu must live on a lower level than nu")
    return wedge(nu, mu)


@dataclass(frozen=True)
class TowerResidueInstance:
    mu: TopForm          # u-differentials, coefficient over R
    nu: TopForm          # v-differentials, coefficient over S
    outer: tuple         # ((t_i, alpha_i), ...) over R
    inner: tuple         # ((g_j, beta_j), ...) over S

    def __post_init__(self):
        object.__setattr__(self, "outer", tuple((t, int(a)) for t, a in self.outer))
        object.__setattr__(self, "inner", tuple((g, int(b)) for g, b in self.inner))
        tower = self.tower
        if len(tower.blocks) < 3:
            raise InstanceError("a tower instance needs blocks A | u | v")
        if self.mu.coefficient.max_block() > 1 or any(t.max_block() > 1 for t, _ in self.outer):
            raise InstanceError("mu and the outer denominators must not involve the top block")

    @property
    def tower(self) -> PolyTower:
        return self.mu.tower

    def inner_instance(self) -> ResidueInstance:
        return ResidueInstance(self.nu, self.inner, base=1)

    def outer_instance(self, inner_value: Poly) -> ResidueInstance:
        return ResidueInstance(self.mu * inner_value, self.outer, base=0)

    def combined_instance(self) -> ResidueInstance:
        return ResidueInstance(chi_wedge(self.mu, self.nu), self.inner + self.outer, base=0)

    def truncated(self, order: int) -> "TowerResidueInstance":
        """Drop numerator terms of total u,v-degree above ``order``."""
        top = [i for i in range(self.tower.nvars) if self.tower.block_of[i] >= 1]
        mu = TopForm(self.mu.coefficient.truncate(top, order), self.mu.factors)
        nu = TopForm(self.nu.coefficient.truncate(top, order), self.nu.factors)
        return TowerResidueInstance(mu, nu, self.outer, self.inner)

    def to_json(self) -> dict:
        tower = self.tower
        return {
            "field": tower.field.name,
            "base_vars": list(tower.blocks[0]),
            "blocks": [list(b) for b in tower.blocks[1:]],
            "form": {"coeff": str(self.mu.coefficient), "d": list(self.mu.names)},
            "denoms": [{"poly": str(t), "exp": a} for t, a in self.outer],
            "inner": {
                "form": {"coeff": str(self.nu.coefficient), "d": list(self.nu.names)},
                "denoms": [{"poly": str(g), "exp": b} for g, b in self.inner],
            },
        }


def tower_instance_from_json(data: Mapping) -> TowerResidueInstance:
    if "inner" not in data:
        raise InstanceError("fubini instances need an 'inner' object")
    tower = tower_from_json(data)
    outer = instance_from_json(data, tower)
    inner_data = dict(data["inner"])
    try:
        nu = TopForm.make(tower(str(inner_data["form"].get("coeff", "1"))), list(inner_data["form"]["d"]))
        inner = [(tower(str(d["poly"])), int(d.get("exp", 1))) for d in inner_data["denoms"]]
    except (KeyError, TypeError, AttributeError) as exc:
        raise InstanceError(f"missing field {exc} in inner instance") from None
    return TowerResidueInstance(outer.form, nu, outer.denoms, tuple(inner))


def load_tower_instance(path) -> TowerResidueInstance:
    with open(path) as fh:
        return tower_instance_from_json(json.load(fh))


@dataclass(frozen=True)
class FubiniReport:
    inner: Poly
    lhs: Poly
    rhs: Poly

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs

    def as_dict(self) -> dict:
        return {"inner": str(self.inner), "lhs": str(self.lhs), "rhs": str(self.rhs), "equal": self.equal}


def verify_fubini(inst: TowerResidueInstance, bound: int = DEFAULT_MONIC_BOUND) -> FubiniReport:
    inner = residue(inst.inner_instance(), bound)
    lhs = residue(inst.outer_instance(inner), bound)
    rhs = residue(inst.combined_instance(), bound)
    return FubiniReport(inner, lhs, rhs)


def _is_variable_power_list(denoms) -> bool:
    for t, _ in denoms:
        if len(t.terms) != 1 or t.terms.get(next(iter(t.terms))) != 1:
            return False
        (e,) = t.terms
        if sum(e) != 1:
            return False
    return True


@dataclass(frozen=True)
class SeriesReport:
    order: int
    truncated: FubiniReport
    full: FubiniReport

    @property
    def equal(self) -> bool:
        return self.truncated.equal and self.truncated.lhs == self.full.lhs

    def as_dict(self) -> dict:
        return {"order": self.order, "truncated": self.truncated.as_dict(),
                "full": self.full.as_dict(), "equal": self.equal}


def series_order(inst: TowerResidueInstance) -> int:
    """A truncation order at which numerators are exact modulo (v^beta, u^alpha)."""
    return sum(a - 1 for _, a in inst.outer) + sum(b - 1 for _, b in inst.inner)


def verify_fubini_series(inst: TowerResidueInstance, order: int | None = None,
                         bound: int = DEFAULT_MONIC_BOUND) -> SeriesReport:
    """Iterated residue identity on the completed tower, modelled by truncation.

    The denominators must be variable powers (so the completion is the
    adic one).  Numerator terms of total degree above ``order`` lie in
    (v^beta, u^alpha) and do not affect either side.
    """
    if not (_is_variable_power_list(inst.outer) and _is_variable_power_list(inst.inner)):
        raise InstanceError("the series variant needs variable-power denominators")
    order = series_order(inst) if order is None else order
    if order < series_order(inst):
        raise InstanceError(f"truncation order {order} is below {series_order(inst)}")
    return SeriesReport(order, verify_fubini(inst.truncated(order), bound), verify_fubini(inst, bound))
