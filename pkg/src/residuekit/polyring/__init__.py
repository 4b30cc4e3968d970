"""Polynomial towers, ideals, normal forms and monic relations."""

from .groebner import GroebnerBudgetExceeded
from .ideal import (
    DEFAULT_MONIC_BOUND,
    IdealSeq,
    NotFiniteOverBase,
    NotMember,
    divide_monic,
    express_in_generators,
    find_monic,
    ideal_member,
    monic_relation,
    normal_form,
)
from .poly import ParseError, Poly, PolyTower, TowerMismatch, parse_poly

__all__ = [
    "DEFAULT_MONIC_BOUND", "GroebnerBudgetExceeded", "IdealSeq", "NotFiniteOverBase",
    "NotMember", "ParseError", "Poly", "PolyTower", "TowerMismatch", "divide_monic",
    "express_in_generators", "find_monic", "ideal_member", "monic_relation",
    "normal_form", "parse_poly",
]
