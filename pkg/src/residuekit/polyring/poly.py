"""Sparse multivariate polynomials over a tower of variable blocks."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from ..exactnum import QQ, Field


class ParseError(ValueError):
    pass


class TowerMismatch(ValueError):
    pass


@dataclass(frozen=True)
class PolyTower:
    """Base ring A = k[block 0] with blocks of variables adjoined in order.

    ``blocks[0]`` holds the base variables (possibly none), ``blocks[1]`` the
    variables of R = A[u], ``blocks[2]`` those of S = R[v], and so on.
    """

    blocks: tuple
    field: Field = QQ

    def __post_init__(self):
        blocks = tuple(tuple(b) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if not blocks:
            raise ValueError("a tower needs at least one block")
        names = [v for b in blocks for v in b]
        if len(set(names)) != len(names):
            raise ValueError(f"variable names must be distinct: {names}")
        for v in names:
            if not _NAME.fullmatch(v):
                raise ValueError(f"bad variable name {v!r}")

    @cached_property
    def variables(self) -> tuple:
        return tuple(v for b in self.blocks for v in b)

    @cached_property
    def index(self) -> dict:
        return {v: i for i, v in enumerate(self.variables)}

    @cached_property
    def block_of(self) -> tuple:
        return tuple(k for k, b in enumerate(self.blocks) for _ in b)

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @cached_property
    def order(self) -> tuple:
        """Variable indices from most to least significant (later blocks first)."""
        out = []
        for k in reversed(range(len(self.blocks))):
            out.extend(i for i in range(self.nvars) if self.block_of[i] == k)
        return tuple(out)

    def sort_key(self, exps):
        return tuple(exps[i] for i in self.order)

    def block_indices(self, k: int) -> list[int]:
        return [i for i in range(self.nvars) if self.block_of[i] == k]

    def indices_upto(self, k: int) -> list[int]:
        return [i for i in range(self.nvars) if self.block_of[i] <= k]

    def var(self, name: str) -> "Poly":
        try:
            i = self.index[name]
        except KeyError:
            raise ParseError(f"unknown variable {name!r}") from None
        e = [0] * self.nvars
        e[i] = 1
        return Poly(self, {tuple(e): 1})

    def gens(self) -> list["Poly"]:
        return [self.var(v) for v in self.variables]

    def const(self, c) -> "Poly":
        c = self.field(c)
        if c == 0:
            return Poly(self, {})
        return Poly(self, {self.zero_exp: c})

    @cached_property
    def zero_exp(self) -> tuple:
        return (0,) * self.nvars

    def zero(self) -> "Poly":
        return Poly(self, {})

    def one(self) -> "Poly":
        return self.const(1)

    def __call__(self, expr) -> "Poly":
        if isinstance(expr, Poly):
            if expr.tower != self:
                raise TowerMismatch("polynomial lives in a different tower")
            return expr
        if isinstance(expr, str):
            return parse_poly(expr, self)
        return self.const(expr)

    def describe(self) -> str:
        return f"{self.field.name}[" + " | ".join(",".join(b) for b in self.blocks) + "]"


class Poly:
    """Immutable polynomial: mapping exponent tuple -> nonzero coefficient."""

    __slots__ = ("tower", "terms", "_hash")

    def __init__(self, tower: PolyTower, terms: Mapping):
        self.tower = tower
        self.terms = terms
        self._hash = None

    # construction helpers
    @classmethod
    def from_terms(cls, tower: PolyTower, terms: Iterable) -> "Poly":
        F = tower.field
        acc: dict = {}
        for e, c in terms:
            e = tuple(e)
            acc[e] = acc.get(e, 0) + c
        return cls(tower, {e: F.norm(c) for e, c in acc.items() if F.norm(c) != 0})

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.tower != self.tower:
                raise TowerMismatch(f"{self.tower.describe()} vs {other.tower.describe()}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.tower.const(other)
        return NotImplemented

    # arithmetic
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        F = self.tower.field
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v = F.norm(v + c)
                if v == 0:
                    del out[e]
                else:
                    out[e] = v
        return Poly(self.tower, out)

    __radd__ = __add__

    def __neg__(self):
        F = self.tower.field
        return Poly(self.tower, {e: F.neg(c) for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        F = self.tower.field
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Poly(self.tower, {e: v for e, c in out.items() if (v := F.norm(c)) != 0})

    __rmul__ = __mul__

    def scale(self, c) -> "Poly":
        F = self.tower.field
        c = F(c)
        if c == 0:
            return self.tower.zero()
        return Poly(self.tower, {e: F.norm(v * c) for e, v in self.terms.items()})

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = self.tower.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.tower.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.tower == other.tower and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.tower, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self):
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.terms.get(self.tower.zero_exp, 0)

    # structure
    def sorted_terms(self) -> list:
        key = self.tower.sort_key
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    def leading_term(self):
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        key = self.tower.sort_key
        e = max(self.terms, key=key)
        return e, self.terms[e]

    def degree(self, var: str | int | None = None) -> int:
        if not self.terms:
            return -1
        if var is None:
            return max(sum(e) for e in self.terms)
        i = self.tower.index[var] if isinstance(var, str) else var
        return max(e[i] for e in self.terms)

    def used_indices(self) -> set:
        return {i for e in self.terms for i, a in enumerate(e) if a}

    def max_block(self) -> int:
        used = self.used_indices()
        return max((self.tower.block_of[i] for i in used), default=0)

    def coefficient(self, exps) -> object:
        return self.terms.get(tuple(exps), 0)

    def coefficient_in(self, indices: Sequence[int], exps: Sequence[int]) -> "Poly":
        """Coefficient of prod x_i^{exps} viewing ``indices`` as the main variables."""
        out = {}
        for e, c in self.terms.items():
            if all(e[i] == a for i, a in zip(indices, exps)):
                e2 = list(e)
                for i in indices:
                    e2[i] = 0
                out[tuple(e2)] = c
        return Poly(self.tower, out)

    def truncate(self, indices: Sequence[int], max_total: int) -> "Poly":
        """Drop terms whose total degree in ``indices`` exceeds ``max_total``."""
        return Poly(self.tower, {e: c for e, c in self.terms.items()
                                 if sum(e[i] for i in indices) <= max_total})

    def is_homogeneous(self, weights: Sequence[int] | None = None) -> bool:
        return len({self.weighted_degree(e, weights) for e in self.terms}) <= 1

    def weighted_degree(self, e, weights=None) -> int:
        if weights is None:
            return sum(e)
        return sum(a * w for a, w in zip(e, weights))

    def subs(self, images: Mapping[str, "Poly"], target: PolyTower | None = None) -> "Poly":
        """Substitute variables by polynomials of ``target`` (default: same tower).

        Variables not in ``images`` are mapped to the identically named
        variable of the target tower.
        """
        target = target or self.tower
        gens = []
        for v in self.tower.variables:
            if v in images:
                img = images[v]
                gens.append(img if isinstance(img, Poly) else target(img))
            else:
                gens.append(target.var(v))
        result = target.zero()
        power_cache: dict = {}
        for e, c in self.terms.items():
            term = target.const(c)
            for i, a in enumerate(e):
                if a:
                    key = (i, a)
                    if key not in power_cache:
                        power_cache[key] = gens[i] ** a
                    term = term * power_cache[key]
            result = result + term
        return result

    def map_coefficients(self, target: PolyTower) -> "Poly":
        """Re-home this polynomial in a tower with the same variables (e.g. new field)."""
        F = target.field
        perm = [target.index[v] for v in self.tower.variables]
        out = {}
        for e, c in self.terms.items():
            e2 = [0] * target.nvars
            for i, a in zip(perm, e):
                e2[i] = a
            out[tuple(e2)] = F(c)
        return Poly.from_terms(target, out.items())

    # printing
    def __str__(self):
        if not self.terms:
            return "0"
        names = self.tower.variables
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(n if a == 1 else f"{n}^{a}" for n, a in zip(names, e) if a)
            neg = False
            if not self.tower.field.p and c < 0:
                neg, c = True, -c
            if mono:
                s = mono if c == 1 else f"{c}*{mono}"
            else:
                s = str(c)
            parts.append((neg, s))
        out = ("-" if parts[0][0] else "") + parts[0][1]
        for neg, s in parts[1:]:
            out += (" - " if neg else " + ") + s
        return out

    def __repr__(self):
        return f"Poly({str(self)!r})"


# ---------------------------------------------------------------------------
# expression parser: integers, names, + - * ^, parentheses, division by constants

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos:pos + 1]!r} at {pos} in {text!r}")
        num, name, op = m.groups()
        if num is not None:
            out.append(("num", int(num)))
        elif name is not None:
            out.append(("name", name))
        else:
            out.append(("op", "^" if op == "**" else op))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text, tower):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.tower = tower

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def fail(self, msg):
        raise ParseError(f"{msg} in {self.text!r}")

    def parse(self):
        if not self.toks:
            self.fail("empty expression")
        p = self.expr()
        if self.i != len(self.toks):
            self.fail(f"unexpected token {self.peek()[1]!r}")
        return p

    def expr(self):
        p = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self):
        p = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            q = self.unary()
            if op == "*":
                p = p * q
            else:
                if not q.is_constant() or q.is_zero():
                    self.fail("division only by nonzero constants")
                p = p.scale(self.tower.field.inv(q.constant_value()))
        return p

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, val = self.take()
            if kind != "num":
                self.fail("exponent must be a non-negative integer")
            return base ** val
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return self.tower.const(val)
        if kind == "name":
            if val not in self.tower.index:
                self.fail(f"unknown variable {val!r}")
            return self.tower.var(val)
        if (kind, val) == ("op", "("):
            p = self.expr()
            if self.take() != ("op", ")"):
                self.fail("missing ')'")
            return p
        self.fail("unexpected end of input" if kind is None else f"unexpected token {val!r}")


def parse_poly(text: str, tower: PolyTower) -> Poly:
    return _Parser(text, tower).parse()
