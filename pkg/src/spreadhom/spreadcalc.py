"""Families of spread modules, irreducible morphisms between them, and the staircase Koszul complex."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import linalg as la
from .poset import (
    FinitePoset,
    GridPoset,
    Point,
    PosetError,
    Spread,
    above_cover,
    antichains,
    below_cover,
    connected_components,
    is_connected,
    make_spread,
)
from .rep import (
    ModMorphism,
    ModuleError,
    PersModule,
    direct_sum,
    hom_basis,
    hom_components,
    indicator_module,
)

FAMILY_KINDS = ("projectives", "segments", "hooks", "single_source_spreads", "spreads", "upsets", "fp_upsets")
DEFAULT_CAP = 200_000

INJECTIVE = "injective"
SURJECTIVE = "surjective"


class TooLarge(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# enumeration


def all_spreads(P: FinitePoset, cap: int = DEFAULT_CAP) -> list[Spread]:
    """Every convex connected subset, via its pair of minimal and maximal antichains."""
    acs = antichains(P)
    masks = {a: P.mask(a) for a in acs}
    up = {a: P.le[masks[a]].any(axis=0) for a in acs}
    down = {b: P.le[:, masks[b]].any(axis=1) for b in acs}
    out = []
    for a in acs:
        for b in acs:
            sm = up[a] & down[b]
            if not sm[masks[b]].all() or not sm[masks[a]].all():
                continue
            sup = frozenset(P.elements[i] for i in np.flatnonzero(sm))
            if tuple(P.minimal(sup)) != a or tuple(P.maximal(sup)) != b:
                continue
            if not is_connected(P, sup):
                continue
            out.append(make_spread(P, sup, check=False))
            if len(out) > cap:
                raise TooLarge(f"more than {cap} spreads")
    return sorted(out, key=lambda s: s.key)


def enumerate_family(P: FinitePoset, kind: str, cap: int = DEFAULT_CAP) -> list[Spread]:
    """Members of a built-in family kind, sorted canonically and free of duplicates."""
    E = P.elements
    if kind == "projectives":
        out = [make_spread(P, P.upset([x]), check=False) for x in E]
    elif kind == "segments":
        out = [make_spread(P, P.upset([a]) & P.downset([b]), check=False)
               for a in E for b in E if P.leq(a, b)]
    elif kind == "hooks":
        out = [make_spread(P, P.upset([a]), check=False) for a in E]
        out += [make_spread(P, P.upset([a]) - P.upset([b]), check=False)
                for a in E for b in E if P.lt(a, b)]
    elif kind in ("single_source_spreads", "spreads"):
        out = all_spreads(P, cap)
        if kind == "single_source_spreads":
            out = [s for s in out if len(s.minima) == 1]
    elif kind in ("upsets", "fp_upsets"):
        if kind == "upsets" and not P.has_unique_maximum():
            raise PosetError("the upset family needs a poset with a unique maximal element")
        out = []
        for a in antichains(P):
            up = P.upset(a)
            if is_connected(P, up):
                out.append(make_spread(P, up, check=False))
    else:
        raise ValueError(f"unknown family kind {kind!r}")
    if len(out) > cap:
        raise TooLarge(f"family has {len(out)} members, cap is {cap}")
    uniq = {s.support: s for s in out}
    return sorted(uniq.values(), key=lambda s: s.key)


def normalize_single_source(P: FinitePoset, a: Point, B: Iterable[Point]) -> tuple[Point, tuple]:
    """Rewrite ⟨a,B⟩ as ⟨a,B′⟨ with B′ the minima of ⟨a,∞⟨ minus ⟨a,B⟩."""
    up = P.upset([a])
    closed = up & P.downset(list(B))
    return a, tuple(P.minimal(up - closed))


# ---------------------------------------------------------------------------
# families with cached Hom data


class Family:
    """A finite family of spread modules with cached combinatorial Hom data."""

    def __init__(self, P: FinitePoset, members: Iterable[Spread], kind: str = "custom", p: int | None = None):
        self.poset = P
        self.kind = kind
        self.p = la.default_prime() if p is None else la.validate_prime(p)
        uniq = {}
        for s in members:
            if not isinstance(s, Spread):
                s = make_spread(P, s)
            uniq[s.support] = s
        self.members: list[Spread] = sorted(uniq.values(), key=lambda s: s.key)
        self.index = {s.support: k for k, s in enumerate(self.members)}
        self.masks = [P.mask(s.support) for s in self.members]
        self._modules: list | None = None
        self._hom: dict | None = None
        self._arrows: list | None = None
        self._pres: dict = {}
        self._oracle = None

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, s) -> bool:
        sup = s.support if isinstance(s, Spread) else frozenset(s)
        return sup in self.index

    @property
    def modules(self) -> list[PersModule]:
        if self._modules is None:
            self._modules = [indicator_module(self.poset, s.support, p=self.p) for s in self.members]
        return self._modules

    def contains_projectives(self) -> bool:
        return all(self.poset.upset([x]) in self.index for x in self.poset.elements)

    def with_projectives(self) -> "Family":
        if self.contains_projectives():
            return self
        extra = [make_spread(self.poset, self.poset.upset([x]), check=False) for x in self.poset.elements]
        return Family(self.poset, list(self.members) + extra, kind=self.kind, p=self.p)

    def hom(self, a: int, b: int) -> list[frozenset]:
        """Supports of the indicator basis of Hom(member a, member b)."""
        if self._hom is None:
            self._build_hom()
        return self._hom.get((a, b), [])

    def _build_hom(self) -> None:
        P = self.poset
        n = len(self.members)
        table = {}
        for a in range(n):
            for b in range(n):
                if not (self.masks[a] & self.masks[b]).any():
                    continue
                comps = hom_components(P, self.members[a].support, self.members[b].support)
                if comps:
                    table[(a, b)] = comps
        self._hom = table

    def arrows(self) -> list[list[tuple[int, np.ndarray]]]:
        """For each member a, irreducible maps out of a as (target, pointwise scalar vector).

        The maps span Hom(a, b) modulo the radical square; compositions of
        indicator morphisms are again indicators, so everything is computed on
        0/1 vectors over the poset points.
        """
        if self._arrows is None:
            self._arrows = self._build_arrows()
        return self._arrows

    def _build_arrows(self) -> list:
        P, p = self.poset, self.p
        n, npts = len(self.members), len(P)
        if self._hom is None:
            self._build_hom()
        out_nbrs = [[] for _ in range(n)]
        for (a, b), comps in self._hom.items():
            if a != b:
                out_nbrs[a].append(b)
        vec = {}
        for (a, b), comps in self._hom.items():
            vec[(a, b)] = [P.mask(U).astype(np.int64) for U in comps]
        result = []
        for a in range(n):
            arrs = []
            for b in sorted(out_nbrs[a]):
                basis = np.array(vec[(a, b)]).T
                rad2 = []
                for z in out_nbrs[a]:
                    if z == b or (z, b) not in vec:
                        continue
                    for g in vec[(a, z)]:
                        for h in vec[(z, b)]:
                            c = g * h
                            if c.any():
                                rad2.append(c)
                r2 = np.array(rad2).T if rad2 else la.zeros(npts, 0)
                r2 = la.image_basis(r2, p) if r2.shape[1] else r2
                for c in la.extend_columns(r2, basis, p):
                    arrs.append((b, basis[:, c].copy()))
            result.append(arrs)
        return result

    def describe(self) -> dict:
        return {"kind": self.kind, "members": [s.describe() for s in self.members]}


def make_family(P: FinitePoset, kind: str, p: int | None = None, cap: int = DEFAULT_CAP) -> Family:
    return Family(P, enumerate_family(P, kind, cap), kind=kind, p=p)


# ---------------------------------------------------------------------------
# combinatorial criteria; all take (P, source, target) and return a tag or None


def _nonzero_hom(P, src: Spread, tgt: Spread) -> bool:
    return bool(hom_components(P, src.support, tgt.support))


def _single_point(s: Spread, which: str) -> Point:
    pts = s.minima if which == "min" else s.maxima
    if len(pts) != 1:
        raise ValueError(f"expected a unique {which}imum")
    return pts[0]


def irreducible_upsets(P: FinitePoset, src: Spread, tgt: Spread) -> str | None:
    """I_T → I_S is irreducible iff S = T ∪ {x} with x ⋖ T."""
    T, S = src.support, tgt.support
    extra = S - T
    if not T <= S or len(extra) != 1:
        return None
    (x,) = extra
    return INJECTIVE if below_cover(P, T, x) else None


def irreducible_segments(P: FinitePoset, src: Spread, tgt: Spread) -> str | None:
    a, b = _single_point(src, "min"), _single_point(src, "max")
    c, d = _single_point(tgt, "min"), _single_point(tgt, "max")
    if P.is_cover(c, a) and P.leq(a, d) and d == b:
        return INJECTIVE
    if c == a and P.leq(a, d) and P.is_cover(d, b):
        return SURJECTIVE
    return None


def hook_endpoints(P: FinitePoset, s: Spread) -> tuple[Point, Point | None]:
    """(a, b) with s = ⟨a,b⟨; b is None for ⟨a,∞⟨."""
    a = _single_point(s, "min")
    if not s.exits:
        return a, None
    if len(s.exits) != 1:
        raise ValueError("not a hook")
    return a, s.exits[0]


def irreducible_hooks(P: FinitePoset, src: Spread, tgt: Spread) -> str | None:
    """Hooks ⟨a,b⟨ → ⟨c,d⟨ with ∞ treated as an adjoined top element."""
    a, b = hook_endpoints(P, src)
    c, d = hook_endpoints(P, tgt)

    def not_above(x, y):  # x ≱ y, with y = ∞ never below a finite point
        return y is None or not P.leq(y, x)

    def covered_by(x, y):  # x ⋖ y in P ∪ {∞}
        if x is None:
            return False
        if y is None:
            return x in P.maximal(P.elements)
        return P.is_cover(x, y)

    if P.is_cover(c, a) and not_above(a, d) and d == b:
        return INJECTIVE
    if c == a and not_above(a, d) and covered_by(d, b):
        return SURJECTIVE
    return None


def irreducible_single_source(P: FinitePoset, src: Spread, tgt: Spread) -> str | None:
    a = _single_point(src, "min")
    c = _single_point(tgt, "min")
    S, T = src.support, tgt.support
    if T < S and len(S - T) == 1 and next(iter(S - T)) in src.maxima:
        return SURJECTIVE
    if P.is_cover(c, a):
        _, b1 = normalize_single_source(P, a, src.maxima)
        _, d1 = normalize_single_source(P, c, tgt.maxima)
        if set(b1) == set(d1):
            return INJECTIVE
    return None


def irreducible_spreads(P: FinitePoset, src: Spread, tgt: Spread) -> str | None:
    S, T = src.support, tgt.support
    if T < S:
        tmask = P.mask(T)
        not_below_D = ~P.le[:, P.mask(tgt.maxima)].any(axis=1)
        for x in P.sort_points(S - T):
            if not above_cover(P, T, x):
                continue
            cohook = P.le[:, P._idx(x)] & not_below_D
            if np.array_equal(P.mask(S), tmask | cohook) and not (cohook & tmask).any():
                return SURJECTIVE
    if S < T:
        for c in tgt.minima:
            if S not in connected_components(P, T - {c}):
                continue
            up_c = P.le[P._idx(c)]
            not_above_A = ~P.le[P.mask(src.minima)].any(axis=0)
            hook_mask = up_c & not_above_A
            if np.array_equal(P.mask(T), P.mask(S) | hook_mask):
                return INJECTIVE
    return None


CRITERIA = {
    "segments": irreducible_segments,
    "hooks": irreducible_hooks,
    "single_source_spreads": irreducible_single_source,
    "spreads": irreducible_spreads,
    "upsets": irreducible_upsets,
    "fp_upsets": irreducible_upsets,
}


# ---------------------------------------------------------------------------
# oracle via linear algebra


class OracleTable:
    """Hom bases between family members computed by solving naturality equations.

    Members are thin, so every morphism is stored as its vector of pointwise
    scalars and composition is an elementwise product.
    """

    def __init__(self, family: Family):
        self.family = family
        P, p = family.poset, family.p
        mods = family.modules
        n = len(mods)
        self.vectors: dict = {}
        for a in range(n):
            for b in range(n):
                if not (family.masks[a] & family.masks[b]).any():
                    continue
                basis = hom_basis(mods[a], mods[b])
                if basis:
                    self.vectors[(a, b)] = np.array([_thin_vector(f) for f in basis]).T
        self._rad2: dict = {}

    def hom_dim(self, a: int, b: int) -> int:
        v = self.vectors.get((a, b))
        return 0 if v is None else v.shape[1]

    def rad2(self, a: int, b: int) -> np.ndarray:
        """Spanning columns of the radical square between two distinct members."""
        key = (a, b)
        if key in self._rad2:
            return self._rad2[key]
        p = self.family.p
        cols = []
        for z in range(len(self.family)):
            if z in (a, b):
                continue
            g = self.vectors.get((a, z))
            h = self.vectors.get((z, b))
            if g is None or h is None:
                continue
            for i in range(g.shape[1]):
                for j in range(h.shape[1]):
                    c = np.mod(g[:, i] * h[:, j], p)
                    if c.any():
                        cols.append(c)
        npts = len(self.family.poset)
        m = np.array(cols).T if cols else la.zeros(npts, 0)
        m = la.image_basis(m, p) if m.shape[1] else m
        self._rad2[key] = m
        return m

    def irreducible_dim(self, a: int, b: int) -> int:
        if a == b:
            return 0
        h = self.hom_dim(a, b)
        if h == 0:
            return 0
        return h - self.rad2(a, b).shape[1]


def _thin_vector(f: ModMorphism) -> np.ndarray:
    out = np.zeros(len(f.mats), dtype=np.int64)
    for i, m in enumerate(f.mats):
        if m.size > 1:
            raise ModuleError("oracle expects modules of dimension at most one")
        if m.size:
            out[i] = m[0, 0]
    return out


def oracle_table(family: Family) -> OracleTable:
    if family._oracle is None:
        family._oracle = OracleTable(family)
    return family._oracle


def _member_index(family: Family, M: PersModule) -> int:
    sup = M.support()
    if sup not in family.index or any(d > 1 for d in M.dims):
        raise ValueError("module is not a family member")
    return family.index[sup]


def irreducible_oracle(P: FinitePoset, family: Family, f: ModMorphism) -> bool:
    """Whether f is nonzero and outside the radical square of add(family)."""
    a = _member_index(family, f.source)
    b = _member_index(family, f.target)
    if a == b or f.is_zero():
        return False
    tab = oracle_table(family)
    r2 = tab.rad2(a, b)
    v = _thin_vector(f)
    return la.solve(r2, v, family.p) is None


@dataclass
class QuiverReport:
    vertices: list
    arrows: list  # (source index, target index, multiplicity)
    kind: str = "custom"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "vertices": [s.describe() for s in self.vertices],
            "arrows": [{"source": a, "target": b, "multiplicity": m} for a, b, m in self.arrows],
        }

    def to_dot(self) -> str:
        lines = ["digraph quiver {"]
        for k, s in enumerate(self.vertices):
            label = _spread_label(s)
            lines.append(f'  v{k} [label="{label}"];')
        for a, b, m in self.arrows:
            extra = f' [label="{m}"]' if m > 1 else ""
            lines.append(f"  v{a} -> v{b}{extra};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _fmt_point(x) -> str:
    return "(" + ",".join(str(v) for v in x) + ")" if isinstance(x, tuple) else str(x)


def _spread_label(s: Spread) -> str:
    a = " ".join(_fmt_point(x) for x in s.minima)
    b = "inf" if not s.exits else " ".join(_fmt_point(x) for x in s.exits)
    return f"<{a} ; {b}<"


def end_quiver(P: FinitePoset, family: Family) -> QuiverReport:
    """Arrows X → Y with multiplicity dim (rad/rad²)(X, Y)."""
    tab = oracle_table(family)
    arrows = []
    for a in range(len(family)):
        for b in range(len(family)):
            m = tab.irreducible_dim(a, b)
            if m:
                arrows.append((a, b, m))
    return QuiverReport(list(family.members), arrows, family.kind)


# ---------------------------------------------------------------------------
# complexes


@dataclass
class CochainComplex:
    """0 → U^0 → U^1 → ... → U^n → 0 with differentials ``diffs[p]: U^p → U^{p+1}``.

    ``summands[p]`` lists the spreads whose indicator modules make up U^p, in order.
    """

    terms: list
    diffs: list
    summands: list = field(default_factory=list)
    labels: list = field(default_factory=list)

    @property
    def poset(self) -> FinitePoset:
        return self.terms[0].poset

    def is_complex(self) -> bool:
        p = self.terms[0].p
        for d0, d1 in zip(self.diffs, self.diffs[1:]):
            for a, b in zip(d0.mats, d1.mats):
                if a.size and b.size and np.any(la.matmul(b, a, p)):
                    return False
        return True

    def is_exact(self) -> bool:
        """Exactness at every term, including injectivity at U^0 and surjectivity at U^n."""
        p = self.terms[0].p
        n = len(self.terms)
        for x in range(len(self.poset)):
            ranks = [la.rank(d.mats[x], p) for d in self.diffs]
            for k in range(n):
                r_in = ranks[k - 1] if k > 0 else 0
                r_out = ranks[k] if k < len(ranks) else 0
                if r_in + r_out != self.terms[k].dims[x]:
                    return False
        return True

    def euler_characteristic(self) -> list[int]:
        return [sum((-1) ** k * T.dims[x] for k, T in enumerate(self.terms)) for x in range(len(self.poset))]

    def block_signs(self, k: int) -> np.ndarray:
        """Scalar of each component of ``diffs[k]`` as an integer in {-1, 0, 1}."""
        P = self.poset
        src, tgt = self.summands[k], self.summands[k + 1]
        d = self.diffs[k]
        p = d.p
        out = np.zeros((len(tgt), len(src)), dtype=np.int64)
        for c, s in enumerate(src):
            col_off = [sum(1 for t in src[:c] if P.elements[x] in t.support) for x in range(len(P))]
            for r, t in enumerate(tgt):
                common = s.support & t.support
                if not common:
                    continue
                x = P._idx(min(common, key=P._idx))
                row_off = sum(1 for u in tgt[:r] if P.elements[x] in u.support)
                v = int(d.mats[x][row_off, col_off[x]]) % p
                out[r, c] = -1 if v == p - 1 else v
        return out


def _quotient_components(P: FinitePoset, src_spreads: list, tgt_spreads: list, coeff, p: int) -> list:
    """Pointwise matrices of Σ coeff[r][c]·(identity on the target support) between indicator sums."""
    mats = []
    for x in P.elements:
        rows = [r for r, t in enumerate(tgt_spreads) if x in t.support]
        cols = [c for c, s in enumerate(src_spreads) if x in s.support]
        m = la.zeros(len(rows), len(cols))
        for i, r in enumerate(rows):
            for j, c in enumerate(cols):
                m[i, j] = coeff[r][c] % p
        mats.append(m)
    return mats


def koszul_complex(n: int, p: int | None = None) -> CochainComplex:
    """The staircase Koszul complex on the n×n grid with coordinates 1..n.

    S = ⟨(1,1), B⟩ with B = {x_i = (i, n+1-i)} and U^k = ⊕_{|B′|=k} I_{S∖B′}.
    Summands are ordered by the sorted index tuple of B′; the component from
    B′∖{x_{i_j}} to B′ is (-1)^{j+1} times the quotient map.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    P = GridPoset([range(1, n + 1)] * 2)
    pr = la.default_prime() if p is None else la.validate_prime(p)
    B = [(i, n + 1 - i) for i in range(1, n + 1)]
    S = P.upset([(1, 1)]) & P.downset(B)
    subsets = [list(itertools.combinations(range(n), k)) for k in range(n + 1)]
    summands = [[make_spread(P, S - {B[i] for i in sub}) for sub in subs] for subs in subsets]
    terms = [direct_sum([indicator_module(P, s.support, p=pr) for s in row], P, pr) for row in summands]
    diffs = []
    for k in range(n):
        coeff = [[0] * len(subsets[k]) for _ in subsets[k + 1]]
        for r, big in enumerate(subsets[k + 1]):
            for j, removed in enumerate(big, start=1):
                small = tuple(i for i in big if i != removed)
                c = subsets[k].index(small)
                coeff[r][c] = (-1) ** (j + 1)
        mats = _quotient_components(P, summands[k], summands[k + 1], coeff, pr)
        diffs.append(ModMorphism(terms[k], terms[k + 1], mats))
    labels = [[[i + 1 for i in sub] for sub in subs] for subs in subsets]
    return CochainComplex(terms, diffs, summands, labels)


@dataclass
class ContraReport:
    exact: bool
    top_dims: list
    details: list

    def __bool__(self) -> bool:
        return self.exact


def _contra_hom_matrix(d: CochainComplex, k: int, Y: PersModule, homs: dict) -> np.ndarray:
    """Matrix of Hom(d^k, Y): Hom(U^{k+1}, Y) → Hom(U^k, Y) in the indicator bases."""
    P, p = d.poset, Y.p
    src, tgt = d.summands[k], d.summands[k + 1]
    signs = d.block_signs(k)
    col_blocks = [homs[t.support] for t in tgt]
    row_blocks = [homs[s.support] for s in src]
    nrows = sum(len(b) for b in row_blocks)
    ncols = sum(len(b) for b in col_blocks)
    m = la.zeros(nrows, ncols)
    c0 = 0
    for r_t, tb in enumerate(col_blocks):
        r0 = 0
        for c_s, sb in enumerate(row_blocks):
            sgn = signs[r_t, c_s]
            if sgn:
                # h ∘ (±q) for h an indicator on U ⊆ t is the indicator on U ∩ s
                for jj, hu in enumerate(tb):
                    comp = hu & src[c_s].support
                    if not comp:
                        continue
                    vec = _express(comp, sb, P)
                    for ii, coef in vec.items():
                        m[r0 + ii, c0 + jj] = (m[r0 + ii, c0 + jj] + sgn * coef) % p
            r0 += len(sb)
        c0 += len(tb)
    return m


def _express(support: frozenset, basis: list, P) -> dict:
    """Coordinates of the indicator of ``support`` in a basis of disjoint indicators."""
    out = {}
    covered = set()
    for i, b in enumerate(basis):
        if b <= support:
            out[i] = 1
            covered |= b
    if covered != support:
        raise ModuleError("composite is not in the span of the indicator basis")
    return out


def check_relative_exact_contra(complex_: CochainComplex, family: Family) -> ContraReport:
    """Exactness of Hom(U^•, Y) for every member Y, away from the top.

    Hom(U^n,Y) → ... → Hom(U^1,Y) → Hom(U^0,Y) must be exact at every term
    with index at least one, including injectivity at U^n.  The cokernel at
    U^0 is reported per member in ``top_dims``.
    """
    P = complex_.poset
    p = family.p
    n = len(complex_.terms) - 1
    details, tops, ok = [], [], True
    spreads_used = {s.support for row in complex_.summands for s in row}
    for y, Y in zip(family.members, family.modules):
        homs = {s: hom_components(P, s, y.support) for s in spreads_used}
        mats = [_contra_hom_matrix(complex_, k, Y, homs) for k in range(n)]
        dims = [sum(len(homs[s.support]) for s in row) for row in complex_.summands]
        ranks = [la.rank(m, p) if m.size else 0 for m in mats]
        for k in range(1, n + 1):
            r_in = ranks[k] if k < n else 0  # Hom(d^k) lands in Hom(U^k)
            r_out = ranks[k - 1]  # Hom(d^{k-1}) leaves Hom(U^k)
            if r_in + r_out != dims[k]:
                ok = False
                details.append({"member": y.describe(), "position": k})
        tops.append(dims[0] - ranks[0])
    return ContraReport(ok, tops, details)
