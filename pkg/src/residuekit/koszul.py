"""Free cochain complexes, Koszul and stable Koszul complexes, graded cohomology.

Conventions: a complex has terms C^n and differentials d^n: C^n -> C^{n+1},
stored as (rank C^{n+1}) x (rank C^n) matrices acting on column vectors.

* shift: (C[k])^n = C^{n+k} with differential (-1)^k d.
* tensor: d(x (x) y) = dx (x) y + (-1)^p x (x) dy for x in C^p.
* dual: Hom(C, R) in degree n is Hom(C^{-n}, R); the differential is the
  plain transpose, with no signs.

The cohomological Koszul complex K(t) is the dual of the tensor product of
the two-term complexes R --t_i--> R, so its signs come from the tensor rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Callable, Mapping, Sequence

from . import exactnum
from .exactnum import Field
from .localcoh import BRACE, GenFrac, NormalSymbol, variant_convert
from .polyring import IdealSeq, Poly, PolyTower
from .polyring import matrix as pm


class NotGraded(ValueError):
    pass


class ComplexError(ValueError):
    pass


@dataclass(frozen=True)
class FreeComplex:
    tower: PolyTower
    ranks: Mapping[int, int]
    diffs: Mapping[int, list]
    labels: Mapping[int, tuple] | None = None
    shifts: Mapping[int, tuple] | None = None  # internal degrees of the basis elements
    check: bool = field(default=True, compare=False)

    def __post_init__(self):
        ranks = {n: r for n, r in self.ranks.items() if r}
        object.__setattr__(self, "ranks", ranks)
        for n, d in self.diffs.items():
            rows, cols = self.rank(n + 1), self.rank(n)
            if len(d) != rows or any(len(row) != cols for row in d):
                raise ComplexError(f"d^{n} should be {rows}x{cols}")
        if self.check:
            for n in self.degrees():
                if not pm.is_zero(self.compose(n)):
                    raise ComplexError(f"d^{n + 1} o d^{n} != 0")

    def rank(self, n: int) -> int:
        return self.ranks.get(n, 0)

    def degrees(self) -> list[int]:
        if not self.ranks:
            return []
        return list(range(min(self.ranks), max(self.ranks) + 1))

    @property
    def degree_range(self) -> tuple:
        d = self.degrees()
        return (d[0], d[-1]) if d else (0, -1)

    def d(self, n: int) -> list:
        if n in self.diffs:
            return self.diffs[n]
        return pm.zeros(self.tower, self.rank(n + 1), self.rank(n))

    def compose(self, n: int) -> list:
        a, b = self.d(n + 1), self.d(n)
        if not a or not b or not b[0]:
            return pm.zeros(self.tower, len(a), len(b[0]) if b else 0)
        return pm.matmul(a, b, self.tower)

    def label(self, n: int) -> tuple:
        if self.labels and n in self.labels:
            return self.labels[n]
        return tuple(range(self.rank(n)))

    def shift(self, k: int) -> "FreeComplex":
        sign = -1 if k % 2 else 1
        return FreeComplex(
            self.tower,
            {n - k: r for n, r in self.ranks.items()},
            {n - k: pm.scale(d, sign) for n, d in self.diffs.items()},
            {n - k: lab for n, lab in self.labels.items()} if self.labels else None,
            {n - k: s for n, s in self.shifts.items()} if self.shifts else None,
            check=False,
        )

    def dual(self) -> "FreeComplex":
        return FreeComplex(
            self.tower,
            {-n: r for n, r in self.ranks.items()},
            {-n - 1: pm.transpose(d, self.rank(n)) for n, d in self.diffs.items()},
            {-n: lab for n, lab in self.labels.items()} if self.labels else None,
            {-n: tuple(-x for x in s) for n, s in self.shifts.items()} if self.shifts else None,
            check=False,
        )

    def map_entries(self, fn: Callable[[Poly], Poly], tower: PolyTower) -> "FreeComplex":
        return FreeComplex(tower, dict(self.ranks),
                           {n: pm.apply(d, fn) for n, d in self.diffs.items()},
                           self.labels, self.shifts)


def module_complex(tower: PolyTower, rank: int, degree: int = 0, shifts=None) -> FreeComplex:
    """A free module R^rank viewed as a complex concentrated in one degree."""
    return FreeComplex(tower, {degree: rank}, {},
                       {degree: tuple(range(rank))},
                       {degree: tuple(shifts) if shifts else (0,) * rank})


def tensor(C: FreeComplex, D: FreeComplex) -> FreeComplex:
    """C (x) D with the Koszul sign rule; basis ordered by (p, i, j) lexicographically."""
    if C.tower != D.tower:
        raise ComplexError("tensor of complexes over different towers")
    tower = C.tower
    index: dict = {}
    labels: dict = {}
    shifts: dict = {}
    graded = C.shifts is not None and D.shifts is not None
    for p in C.degrees():
        for q in D.degrees():
            n = p + q
            for i in range(C.rank(p)):
                for j in range(D.rank(q)):
                    pos = len(labels.setdefault(n, []))
                    index[(p, i, q, j)] = (n, pos)
                    labels[n].append((C.label(p)[i], D.label(q)[j]))
                    if graded:
                        shifts.setdefault(n, []).append(C.shifts[p][i] + D.shifts[q][j])
    ranks = {n: len(v) for n, v in labels.items()}
    diffs = {n: pm.zeros(tower, ranks.get(n + 1, 0), ranks[n]) for n in ranks}
    for (p, i, q, j), (n, col) in index.items():
        dc = C.d(p)
        for k in range(C.rank(p + 1)):
            c = dc[k][i]
            if c:
                _, row = index[(p + 1, k, q, j)]
                diffs[n][row][col] = diffs[n][row][col] + c
        dd = D.d(q)
        sign = -1 if p % 2 else 1
        for k in range(D.rank(q + 1)):
            c = dd[k][j]
            if c:
                _, row = index[(p, i, q + 1, k)]
                diffs[n][row][col] = diffs[n][row][col] + c * sign
    diffs = {n: d for n, d in diffs.items() if d and d[0] and not pm.is_zero(d)}
    return FreeComplex(tower, ranks, diffs,
                       {n: tuple(v) for n, v in labels.items()},
                       {n: tuple(v) for n, v in shifts.items()} if graded else None)


@dataclass(frozen=True)
class ChainMap:
    source: FreeComplex
    target: FreeComplex
    comps: Mapping[int, list]  # n -> (rank target^n) x (rank source^n)

    def comp(self, n: int) -> list:
        if n in self.comps:
            return self.comps[n]
        return pm.zeros(self.source.tower, self.target.rank(n), self.source.rank(n))

    def commutes(self) -> bool:
        tower = self.source.tower
        degrees = set(self.source.degrees()) | set(self.target.degrees())
        for n in degrees:
            if not self.source.rank(n) or not self.target.rank(n + 1):
                continue
            lhs = _mm(self.target.d(n), self.comp(n), tower)
            rhs = _mm(self.comp(n + 1), self.source.d(n), tower)
            if lhs != rhs:
                return False
        return True

    def then(self, other: "ChainMap") -> "ChainMap":
        """other o self."""
        tower = self.source.tower
        comps = {n: _mm(other.comp(n), self.comp(n), tower)
                 for n in self.source.degrees() if other.target.rank(n)}
        return ChainMap(self.source, other.target, comps)


def _mm(a, b, tower):
    if not a or not b or not b[0] or not a[0]:
        return pm.zeros(tower, len(a), len(b[0]) if b else 0)
    return pm.matmul(a, b, tower)


# ---------------------------------------------------------------------------
# Koszul complexes

def _generators(t) -> list[Poly]:
    if isinstance(t, IdealSeq):
        return list(t.gens)
    return list(t)


def _homogeneous_degree(p: Poly):
    if p.is_zero():
        return 0
    if not p.is_homogeneous():
        return None
    return sum(next(iter(p.terms)))


def koszul_homology_factor(ti: Poly) -> FreeComplex:
    """K_.(t_i): R --t_i--> R placed in cochain degrees -1 -> 0."""
    deg = _homogeneous_degree(ti)
    shifts = {-1: (deg,), 0: (0,)} if deg is not None else None
    return FreeComplex(ti.tower, {-1: 1, 0: 1}, {-1: [[ti]]}, {-1: (1,), 0: (0,)}, shifts)


def _flatten_bits(label) -> tuple:
    if isinstance(label, tuple):
        out = ()
        for part in label:
            out += _flatten_bits(part)
        return out
    return (label,)


def koszul_homology(t) -> FreeComplex:
    gens = _generators(t)
    C = koszul_homology_factor(gens[0])
    for ti in gens[1:]:
        C = tensor(C, koszul_homology_factor(ti))
    return C


def koszul_cochain(t, rank: int = 1) -> FreeComplex:
    """K(t, M) for M = R^rank: the transpose of K_.(t_1) (x) ... (x) K_.(t_r).

    Basis elements of K^i are labelled by sorted index subsets (1-based),
    ordered lexicographically.  For homogeneous t, internal degrees are set so
    that the generator of K^r has degree 0.
    """
    gens = _generators(t)
    r = len(gens)
    tower = gens[0].tower
    K = koszul_homology(gens).dual()
    labels, perms = {}, {}
    for n in K.degrees():
        subsets = [tuple(k + 1 for k, b in enumerate(_flatten_bits(lab)) if b) for lab in K.label(n)]
        order = sorted(range(len(subsets)), key=lambda k: subsets[k])
        perms[n] = order
        labels[n] = tuple(subsets[k] for k in order)
    diffs = {}
    for n, d in K.diffs.items():
        src, dst = perms[n], perms[n + 1]
        diffs[n] = [[d[i][j] for j in src] for i in dst]
    shifts = None
    if K.shifts is not None:
        total = sum(_homogeneous_degree(g) for g in gens)
        shifts = {n: tuple(K.shifts[n][k] + total for k in perms[n]) for n in K.degrees()}
    Kt = FreeComplex(tower, dict(K.ranks), diffs, labels, shifts)
    if rank != 1:
        Kt = tensor(module_complex(tower, rank), Kt)
    return Kt


def koszul_basis(r: int, i: int) -> list[tuple]:
    return [tuple(s) for s in combinations(range(1, r + 1), i)]


def change_of_generators(t, g, U) -> ChainMap:
    """U^. : K(g) -> K(t) for t_i = sum_j U_ij g_j.

    On K^k it is the transpose of the k-th exterior power of U (minors), so
    U^0 is the identity and U^r is multiplication by det(U).
    """
    from .localcoh import check_relation
    t, g = _generators(t), _generators(g)
    tower = t[0].tower
    U = [[tower(x) for x in row] for row in U]
    check_relation(t, g, U)
    Kg, Kt = koszul_cochain(g), koszul_cochain(t)
    r = len(t)
    comps = {}
    for k in range(r + 1):
        subs = koszul_basis(r, k)
        # homology map e_S -> sum_T det U[S, T] f_T; cohomology map is its transpose
        comps[k] = [[pm.minors(U, [s - 1 for s in S], [s - 1 for s in T], tower) if k else tower.one()
                     for T in subs] for S in subs]
    phi = ChainMap(Kg, Kt, comps)
    if not phi.commutes():
        raise AssertionError("change-of-generators map does not commute with differentials")
    return phi


@dataclass(frozen=True)
class StableLevel:
    gens: tuple
    level: tuple
    complex: FreeComplex

    def transition(self, higher: Sequence[int]) -> ChainMap:
        return stable_transition(self, higher)

    def cech_term(self, i: int) -> int:
        """Rank of the Cech term C^i, identified with K^{i+1}."""
        return self.complex.rank(i + 1)


def stable_koszul(t, level: Sequence[int]) -> StableLevel:
    gens = tuple(_generators(t))
    level = tuple(level)
    if len(level) != len(gens) or any(a < 1 for a in level):
        raise ValueError("level must be a positive exponent per generator")
    return StableLevel(gens, level, koszul_cochain([x ** a for x, a in zip(gens, level)]))


def stable_transition(src: StableLevel, higher: Sequence[int]) -> ChainMap:
    """K(t^a) -> K(t^b), b >= a: e*_S |-> prod_{j in S} t_j^(b_j - a_j) e*_S."""
    higher = tuple(higher)
    if any(b < a for a, b in zip(src.level, higher)):
        raise ValueError("transition only goes to higher levels")
    dst = stable_koszul(src.gens, higher)
    tower = src.gens[0].tower
    comps = {}
    for n in src.complex.degrees():
        labs = src.complex.label(n)
        mat = pm.zeros(tower, len(labs), len(labs))
        for k, S in enumerate(labs):
            f = tower.one()
            for j in S:
                f = f * src.gens[j - 1] ** (higher[j - 1] - src.level[j - 1])
            mat[k][k] = f
        comps[n] = mat
    return ChainMap(src.complex, dst.complex, comps)


# ---------------------------------------------------------------------------
# graded cohomology

@dataclass(frozen=True)
class GradedCohomology:
    start: int
    ranks: Mapping[int, tuple]  # cohomological degree -> ranks in internal degrees start..bound
    certified_by: str

    def at(self, n: int, degree: int) -> int:
        vec = self.ranks.get(n, ())
        k = degree - self.start
        return vec[k] if 0 <= k < len(vec) else 0

    def vanishes(self, n: int) -> bool:
        return not any(self.ranks.get(n, ()))


def _monomials(nvars: int, deg: int):
    if deg < 0:
        return []
    if nvars == 0:
        return [()] if deg == 0 else []
    out = []
    for a in range(deg, -1, -1):
        for rest in _monomials(nvars - 1, deg - a):
            out.append((a,) + rest)
    return out


def _graded_piece_matrix(C: FreeComplex, n: int, degree: int, mono_cache):
    """Matrix of d^n restricted to internal degree ``degree`` (scalar entries)."""
    tower = C.tower
    nv = tower.nvars

    def basis(m):
        out = []
        for gi, s in enumerate(C.shifts.get(m, ())):
            key = degree - s
            if key not in mono_cache:
                mono_cache[key] = _monomials(nv, key)
            out.extend((gi, e) for e in mono_cache[key])
        return out

    cols, rows = basis(n), basis(n + 1)
    row_index = {b: k for k, b in enumerate(rows)}
    mat = [[0] * len(cols) for _ in rows]
    d = C.d(n)
    for c, (gi, e) in enumerate(cols):
        for k in range(C.rank(n + 1)):
            entry = d[k][gi]
            for ee, coef in entry.terms.items():
                tgt = (k, tuple(a + b for a, b in zip(e, ee)))
                mat[row_index[tgt]][c] += coef
    return mat, len(rows), len(cols)


def check_graded(C: FreeComplex) -> None:
    if C.shifts is None:
        raise NotGraded("complex carries no internal grading (inhomogeneous entries?)")
    for n, d in C.diffs.items():
        for k, row in enumerate(d):
            for i, entry in enumerate(row):
                if entry.is_zero():
                    continue
                want = C.shifts[n][i] - C.shifts[n + 1][k]
                if not entry.is_homogeneous() or sum(next(iter(entry.terms))) != want:
                    raise NotGraded(f"entry ({k},{i}) of d^{n} is not homogeneous of degree {want}")


def graded_cohomology(C: FreeComplex, bound: int) -> GradedCohomology:
    """Ranks of H^n(C) in each internal degree up to ``bound``.

    Over Q the ranks are first computed modulo a large prime.  Modular ranks
    bound the rational ones from below, so the modular cohomology bounds the
    rational cohomology from above, while Euler characteristics agree; when
    the modular cohomology sits in at most one cohomological degree the
    rational answer is therefore already determined.  Otherwise the missing
    ranks are computed exactly by fraction-free elimination.
    """
    check_graded(C)
    F: Field = C.tower.field
    degrees = C.degrees()
    start = min(min(s) for s in C.shifts.values() if s)
    out = {n: [] for n in degrees}
    how = "modular+euler" if F.p == 0 else F.name
    for deg in range(start, bound + 1):
        cache: dict = {}
        mats = {}
        dims = {}
        for n in degrees:
            mat, rows, cols = _graded_piece_matrix(C, n, deg, cache)
            mats[n] = mat
            dims[n] = cols
        if F.p:
            ranks = {n: exactnum.mat_rank(mats[n], F) if mats[n] and dims[n] else 0 for n in degrees}
        else:
            lower = {n: exactnum.rank_lower_bound(mats[n]) if mats[n] and dims[n] else 0 for n in degrees}
            upper_h = {n: dims[n] - lower[n] - lower.get(n - 1, 0) for n in degrees}
            if sum(1 for v in upper_h.values() if v) <= 1:
                ranks = lower
            else:
                how = "exact"
                ranks = {}
                for n in degrees:
                    m = mats[n]
                    full = min(len(m), dims[n])
                    ranks[n] = lower[n] if lower[n] == full else exactnum.mat_rank(m)
        for n in degrees:
            out[n].append(dims[n] - ranks[n] - ranks.get(n - 1, 0))
    return GradedCohomology(start, {n: tuple(v) for n, v in out.items()}, how)


def hilbert_function_ci(nvars: int, degrees: Sequence[int], bound: int) -> list[int]:
    """Hilbert function of k[x_1..x_n]/(regular sequence of given degrees), degrees 0..bound."""
    series = [1] + [0] * bound
    for d in degrees:
        series = [series[k] - (series[k - d] if k >= d else 0) for k in range(bound + 1)]
    for _ in range(nvars):
        acc = 0
        out = []
        for c in series:
            acc += c
            out.append(acc)
        series = out
    return series


# ---------------------------------------------------------------------------
# fundamental local isomorphism and the trace data of a Koszul complex

def lambda_t(t) -> tuple:
    """lambda_t(1) = (-1)^r 1/t; returned as (sign, symbol)."""
    gens = tuple(_generators(t))
    sign = -1 if len(gens) % 2 else 1
    return sign, NormalSymbol(gens[0].tower.one(), gens)


def fli_to_fraction(m: Poly, t) -> GenFrac:
    """m (x) 1/t |-> [m; t_1, ..., t_r].

    Chased literally: lambda_t^{-1} turns m (x) 1/t into (-1)^r m, whose class
    in the stable Koszul complex is the brace fraction {(-1)^r m; t}; the
    bracket/brace relation then removes the sign.
    """
    gens = tuple(_generators(t))
    sign, _ = lambda_t(gens)
    brace = GenFrac.make(m * sign, gens, None, BRACE)
    return variant_convert(brace)


def phi_t(t) -> dict:
    """K(t) -> N[-r]: in degree r, the quotient map R -> R/I sending 1 to 1/t."""
    gens = tuple(_generators(t))
    tower = gens[0].tower
    return {"degree": len(gens), "matrix": [[tower.one()]], "symbol": NormalSymbol(tower.one(), gens)}


def pi_t(t) -> ChainMap:
    """Projection K(t) -> K^0(t) = R."""
    K = koszul_cochain(t)
    tower = K.tower
    return ChainMap(K, module_complex(tower, 1), {0: [[tower.one()]]})


def evaluation_at_one(C: FreeComplex) -> dict:
    """Projection of C = M (x) K(t) onto the summands M^n (x) K^0 in each degree n.

    Works on complexes built by ``tensor``: a basis label is (m-label, K-label)
    and the K^0 summand is the one labelled by the empty subset.  Returns
    {n: 0/1 matrix from C^n to M^n}.
    """
    tower = C.tower
    out = {}
    for n in C.degrees():
        labs = C.label(n)
        keep = [k for k, lab in enumerate(labs) if _k_part_empty(lab)]
        mat = pm.zeros(tower, len(keep), len(labs))
        for row, k in enumerate(keep):
            mat[row][k] = tower.one()
        out[n] = mat
    return out


def _k_part_empty(label) -> bool:
    if not isinstance(label, tuple) or len(label) != 2:
        raise ComplexError("expected tensor labels (module label, subset)")
    return label[1] == ()


def theta(i: int, j: int, C: FreeComplex, D: FreeComplex) -> ChainMap:
    """(C[i]) (x) (D[j]) -> (C (x) D)[i+j]: the sign (-1)^(a j) on x (x) y, x in (C[i])^a."""
    src = tensor(C.shift(i), D.shift(j))
    dst = tensor(C, D).shift(i + j)
    tower = C.tower
    comps = {}
    for n in src.degrees():
        # src basis order: (a, x, b, y); dst at degree n is (C (x) D)^{n+i+j}
        # with basis (p, x, q, y), p = a + i, q = b + j.  Same enumeration order.
        mat = pm.zeros(tower, dst.rank(n), src.rank(n))
        k = 0
        for a in C.shift(i).degrees():
            b = n - a
            size = C.rank(a + i) * D.rank(b + j)
            sign = -1 if (a * j) % 2 else 1
            for _ in range(size):
                mat[k][k] = tower.const(sign)
                k += 1
        comps[n] = mat
    return ChainMap(src, dst, comps)


def shift_map(f: ChainMap, k: int) -> ChainMap:
    """f[k]: the same components, reindexed (no sign)."""
    return ChainMap(f.source.shift(k), f.target.shift(k), {n - k: c for n, c in f.comps.items()})


def module_shift_composite(M: FreeComplex, N: FreeComplex, e: int, d: int) -> ChainMap:
    """M[e] (x) N[d] -> (M (x) N[d])[e] -> (M (x) N)[d][e] = (M (x) N)[d+e].

    Built as theta^{e,0} followed by theta^{0,d}[e].  For modules (complexes
    concentrated in degree 0) every component is an identity matrix.
    """
    first = theta(e, 0, M, N.shift(d))
    second = shift_map(theta(0, d, M, N), e)
    return first.then(second)


def is_identity_map(f: ChainMap) -> bool:
    tower = f.source.tower
    for n in set(f.source.degrees()) | set(f.target.degrees()):
        if f.source.rank(n) != f.target.rank(n):
            return False
        if f.comp(n) != pm.identity(tower, f.source.rank(n)):
            return False
    return True


def base_change_complex(C: FreeComplex, images: Mapping[str, Poly], target: PolyTower) -> FreeComplex:
    return C.map_entries(lambda p: p.subs(images, target), target)


def koszul_rank_profile(r: int) -> list[int]:
    return [comb(r, i) for i in range(r + 1)]
