"""Generalized fractions [m; t_1^a_1, ..., t_r^a_r] representing classes in H^r_I(M).

Numerators are ring elements (M free of rank one).  Equality is decided at a
common exponent level through ideal membership, which is sound when the
denominators form a regular sequence: then all transition maps of the
direct system are injective.  For other sequences a ``True`` from
``frac_equal`` or ``is_zero`` still proves the claim, but ``False`` is not
conclusive, and no attempt is made to decide it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

from .polyring import IdealSeq, ParseError, Poly, PolyTower, ideal_member
from .polyring import matrix as pm

BRACKET = "bracket"
BRACE = "brace"


class DenominatorMismatch(ValueError):
    pass


class RelationMismatch(ValueError):
    pass


class BlockSplitError(ValueError):
    pass


@dataclass(frozen=True)
class GenFrac:
    numerator: Poly
    denoms: tuple  # ((t_i, a_i), ...)
    variant: str = BRACKET

    def __post_init__(self):
        denoms = tuple((t, int(a)) for t, a in self.denoms)
        object.__setattr__(self, "denoms", denoms)
        if not denoms:
            raise ValueError("a generalized fraction needs at least one denominator")
        if self.variant not in (BRACKET, BRACE):
            raise ValueError(f"unknown variant {self.variant!r}")
        for t, a in denoms:
            if a < 1:
                raise ValueError("exponents must be positive")
            if t.tower != self.numerator.tower:
                raise ValueError("numerator and denominators must share a tower")

    @classmethod
    def make(cls, numerator: Poly, gens: Sequence[Poly], exps: Sequence[int] | None = None,
             variant: str = BRACKET) -> "GenFrac":
        exps = exps or [1] * len(gens)
        return cls(numerator, tuple(zip(gens, exps)), variant)

    @property
    def tower(self) -> PolyTower:
        return self.numerator.tower

    @property
    def r(self) -> int:
        return len(self.denoms)

    @property
    def gens(self) -> tuple:
        return tuple(t for t, _ in self.denoms)

    @property
    def exps(self) -> tuple:
        return tuple(a for _, a in self.denoms)

    def with_numerator(self, m: Poly) -> "GenFrac":
        return GenFrac(m, self.denoms, self.variant)

    def __mul__(self, c):
        return self.with_numerator(self.numerator * c)

    __rmul__ = __mul__

    def __neg__(self):
        return self.with_numerator(-self.numerator)

    def __add__(self, other: "GenFrac") -> "GenFrac":
        if other.variant != self.variant:
            other = variant_convert(other)
        if other.gens != self.gens:
            raise DenominatorMismatch("fractions with different denominator sequences")
        a, b = raise_to(self, common_level(self, other)), raise_to(other, common_level(self, other))
        return a.with_numerator(a.numerator + b.numerator)

    def __sub__(self, other):
        return self + (-other)

    def __str__(self):
        dens = ", ".join(_fmt_denom(t, a) for t, a in self.denoms)
        left, right = ("[", "]") if self.variant == BRACKET else ("{", "}")
        return f"{left}{self.numerator}; {dens}{right}"


def _fmt_denom(t: Poly, a: int) -> str:
    s = str(t)
    if len(t.terms) > 1 or s.startswith("-") or "*" in s or "/" in s or "^" in s:
        s = f"({s})"
    return f"{s}^{a}"


def common_level(x: GenFrac, y: GenFrac) -> tuple:
    return tuple(max(a, b) for a, b in zip(x.exps, y.exps))


def raise_to(x: GenFrac, level: Sequence[int]) -> GenFrac:
    """Rewrite x at a higher exponent level via [m; t^a] = [t m; t^(a+1)]."""
    m = x.numerator
    for (t, a), b in zip(x.denoms, level):
        if b < a:
            raise ValueError(f"cannot lower exponent {a} to {b}")
        if b > a:
            m = m * t ** (b - a)
    return GenFrac(m, tuple(zip(x.gens, level)), x.variant)


@lru_cache(maxsize=512)
def _power_ideal(gens: tuple, exps: tuple) -> IdealSeq:
    return IdealSeq([t ** a for t, a in zip(gens, exps)])


def is_zero(x: GenFrac) -> bool:
    """[m; t^a] = 0 iff m lies in (t_1^a_1, ..., t_r^a_r) (regular sequences)."""
    return ideal_member(x.numerator, _power_ideal(x.gens, x.exps))


def frac_equal(x: GenFrac, y: GenFrac) -> bool:
    if x.gens != y.gens:
        raise DenominatorMismatch(
            "denominator sequences differ; move both to one sequence with transition_psi first")
    if x.variant != y.variant:
        raise ValueError("compare fractions of the same variant (see variant_convert)")
    level = common_level(x, y)
    a, b = raise_to(x, level), raise_to(y, level)
    return ideal_member(a.numerator - b.numerator, _power_ideal(x.gens, level))


def common_normal_form(x: GenFrac, y: GenFrac):
    """Both fractions at their common level with numerators reduced modulo the powers."""
    from .polyring import normal_form
    level = common_level(x, y)
    I = _power_ideal(x.gens, level)
    out = []
    for f in (x, y):
        g = raise_to(f, level)
        out.append(g.with_numerator(normal_form(g.numerator, I)))
    return out


def variant_convert(x: GenFrac) -> GenFrac:
    """[m; t^a] = (-1)^r {m; t^a}: switch notation, twisting the numerator by (-1)^r."""
    other = BRACE if x.variant == BRACKET else BRACKET
    sign = -1 if x.r % 2 else 1
    return GenFrac(x.numerator * sign, x.denoms, other)


def khmap(m: Poly, t: Sequence[Poly], alpha: Sequence[int] | None = None) -> GenFrac:
    """Image of the 0-cochain m (x) 1/t^alpha of M[d] (x) K_inf(t) in H^d_I(M)."""
    d = len(t)
    sign = -1 if d % 2 else 1
    return GenFrac.make(m * sign, list(t), alpha, BRACKET)


def check_relation(t: Sequence[Poly], g: Sequence[Poly], U) -> None:
    if len(t) != len(g) or len(U) != len(t) or any(len(row) != len(g) for row in U):
        raise RelationMismatch("relation matrix has the wrong shape")
    for i, ti in enumerate(t):
        acc = ti.tower.zero()
        for j, gj in enumerate(g):
            acc = acc + U[i][j] * gj
        if acc != ti:
            raise RelationMismatch(f"t_{i + 1} = {ti} but sum_j U_ij g_j = {acc}")


def transition_psi(x: GenFrac, t: Sequence[Poly], U) -> GenFrac:
    """[m; g_1..g_r] |-> [det(U) m; t_1..t_r] where t_i = sum_j U_ij g_j."""
    if any(a != 1 for a in x.exps):
        raise ValueError("transition_psi expects exponents 1; fold powers into the generators")
    t = list(t)
    U = [[x.tower(e) for e in row] for row in U]
    check_relation(t, list(x.gens), U)
    D = pm.det(U, x.tower)
    return GenFrac.make(x.numerator * D, t, None, x.variant)


def base_change_psi(x: GenFrac, images: Mapping[str, Poly | str], target: PolyTower) -> GenFrac:
    """Push a class along the ring map given by variable images (base change on H^r)."""
    sub = {k: (v if isinstance(v, Poly) else target(v)) for k, v in images.items()}
    return GenFrac(x.numerator.subs(sub, target),
                   tuple((t.subs(sub, target), a) for t, a in x.denoms), x.variant)


# ---------------------------------------------------------------------------
# iterated fractions

@dataclass(frozen=True)
class NestedFrac:
    """[m (x) [n; v^beta]; u^alpha]: outer denominators over R, inner over S."""

    outer_num: Poly
    inner: GenFrac
    outer: tuple  # ((u_i, alpha_i), ...)

    @property
    def outer_gens(self):
        return tuple(t for t, _ in self.outer)

    @property
    def outer_exps(self):
        return tuple(a for _, a in self.outer)

    def __str__(self):
        dens = ", ".join(_fmt_denom(t, a) for t, a in self.outer)
        return f"[{self.outer_num} (x) {self.inner}; {dens}]"


def _split_point(x: GenFrac, inner_count: int | None) -> int:
    top = max(t.max_block() for t in x.gens)
    if inner_count is None:
        inner_count = 0
        while inner_count < x.r and x.gens[inner_count].max_block() == top:
            inner_count += 1
    if not 0 < inner_count < x.r:
        raise BlockSplitError("need a nonempty inner (top level) and outer (lower level) part")
    for t in x.gens[inner_count:]:
        if t.max_block() >= top:
            raise BlockSplitError(f"outer denominator {t} involves top-level variables")
    for t in x.gens[:inner_count]:
        if t.max_block() < top:
            raise BlockSplitError(f"inner denominator {t} does not involve top-level variables")
    return inner_count


def leray_iso(x: GenFrac, split: tuple | None = None, inner_count: int | None = None) -> NestedFrac:
    """[m (x) n; v^beta, u^alpha] |-> [m (x) [n; v^beta]; u^alpha].

    ``split = (m, n)`` factors the numerator as m * n with m over the lower
    level; by default m = 1 and n is the whole numerator.
    """
    if x.variant != BRACKET:
        x = variant_convert(x)
    e = _split_point(x, inner_count)
    if split is None:
        m, n = x.tower.one(), x.numerator
    else:
        m, n = split
        if m * n != x.numerator:
            raise ValueError("split does not multiply back to the numerator")
        top = max(t.max_block() for t in x.gens)
        if not m.is_zero() and m.max_block() >= top:
            raise BlockSplitError(f"outer numerator factor {m} involves top-level variables")
    inner = GenFrac(n, x.denoms[:e], BRACKET)
    return NestedFrac(m, inner, x.denoms[e:])


def leray_iso_inv(y: NestedFrac) -> GenFrac:
    return GenFrac(y.outer_num * y.inner.numerator, y.inner.denoms + y.outer, BRACKET)


def nested_equal(x: NestedFrac, y: NestedFrac) -> bool:
    """Equality in H^d_I(M (x) H^e_J(N)), decided at a common level of both layers."""
    if x.inner.gens != y.inner.gens or x.outer_gens != y.outer_gens:
        raise DenominatorMismatch("nested fractions over different denominator sequences")
    return frac_equal(leray_iso_inv(x), leray_iso_inv(y))


def cocycle_chase(m: Poly, n: Poly, v: Sequence[Poly], beta: Sequence[int],
                  u: Sequence[Poly], alpha: Sequence[int]) -> tuple:
    """Both images of the 0-cocycle m (x) n (x) 1/(v^beta, u^alpha).

    East then south: the combined 0-cochain map followed by the Leray
    isomorphism.  South then east: the inner 0-cochain map on n, then the
    outer one on m.  Returns (east_south, south_east) as nested fractions;
    both equal (-1)^(d+e) [m (x) [n; v^beta]; u^alpha].
    """
    e, d = len(v), len(u)
    combined = khmap(m * n, list(v) + list(u), list(beta) + list(alpha))
    sign = -1 if (d + e) % 2 else 1
    east_south = leray_iso(combined, split=(m * sign, n), inner_count=e)
    inner = khmap(n, v, beta)
    outer_sign = -1 if d % 2 else 1
    south_east = NestedFrac(m * outer_sign, inner, tuple(zip(u, alpha)))
    return east_south, south_east


# ---------------------------------------------------------------------------
# symbols 1/t in the dual of the top exterior power of I/I^2

@dataclass(frozen=True)
class NormalSymbol:
    """coeff * 1/(t_1, ..., t_r)."""

    coeff: Poly
    gens: tuple

    def __mul__(self, c):
        return NormalSymbol(self.coeff * c, self.gens)

    __rmul__ = __mul__

    def __str__(self):
        return f"{self.coeff} * 1/(" + ", ".join(str(t) for t in self.gens) + ")"


def compose_normal_gens(first: NormalSymbol, second: NormalSymbol, lifts: Sequence[Poly] | None = None) -> NormalSymbol:
    """1/t (x) 1/u-bar |-> 1/(t, u), u the given lifts of the quotient generators."""
    lifts = tuple(lifts) if lifts is not None else second.gens
    if len(lifts) != len(second.gens):
        raise ValueError("one lift per quotient generator")
    return NormalSymbol(first.coeff * second.coeff, tuple(first.gens) + lifts)


# ---------------------------------------------------------------------------
# text syntax: "[ <poly> ; <poly>^<int>, ... ]" or "{ ... }"

_EXP_SPLIT = re.compile(r"^(.*)\^\s*(\d+)$", re.S)
_ATOM = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*|\d+)\s*$")


def _split_top(text: str, sep: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def _balanced_group(s: str) -> bool:
    s = s.strip()
    if not (s.startswith("(") and s.endswith(")")):
        return False
    depth = 0
    for k, ch in enumerate(s):
        depth += ch == "("
        depth -= ch == ")"
        if depth == 0 and k != len(s) - 1:
            return False
    return True


def _parse_denom(text: str, tower: PolyTower):
    m = _EXP_SPLIT.match(text.strip())
    if m and (_ATOM.match(m.group(1)) or _balanced_group(m.group(1))):
        return tower(m.group(1)), int(m.group(2))
    return tower(text), 1


def parse_fraction(text: str, tower: PolyTower) -> GenFrac:
    s = text.strip()
    if s[:1] == "[" and s[-1:] == "]":
        variant = BRACKET
    elif s[:1] == "{" and s[-1:] == "}":
        variant = BRACE
    else:
        raise ParseError(f"fraction must be '[m; t^a, ...]' or '{{m; t^a, ...}}': {text!r}")
    body = _split_top(s[1:-1], ";")
    if len(body) != 2:
        raise ParseError(f"expected exactly one ';' in {text!r}")
    num = tower(body[0])
    dens = [d for d in _split_top(body[1], ",")]
    if any(not d.strip() for d in dens):
        raise ParseError(f"empty denominator in {text!r}")
    return GenFrac(num, tuple(_parse_denom(d, tower) for d in dens), variant)
