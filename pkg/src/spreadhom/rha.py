"""Relative homological algebra with respect to a family of spread modules.

Covers use the radical formula: the multiplicity of a member X in the
minimal cover of M is dim Hom(X, M) minus the dimension of the subspace
of maps that factor through a radical map X → Z.  Because every member is a
brick, that subspace is spanned by the composites h ∘ a for the irreducible
maps a out of X cached on the family.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import linalg as la
from .poset import FinitePoset, GridPoset, Spread, make_spread
from .rep import (
    ModMorphism,
    ModuleError,
    PersModule,
    compose,
    direct_sum,
    cokernel,
    hom_basis,
    identity_morphism,
    image,
    indicator_module,
    kernel,
    minimal_presentation,
    random_module,
    simple,
)
from .spreadcalc import Family, all_spreads, make_family


class ResolutionTruncated(RuntimeError):
    def __init__(self, resolution: "Resolution"):
        super().__init__(f"resolution exceeds the length budget {resolution.max_len}")
        self.resolution = resolution


class FamilyError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Hom(X, M) for family members via their presentations


@dataclass
class _MemberData:
    support: list  # element indices, increasing
    gens: list  # element indices of generators
    rels: list
    matrix: np.ndarray  # rels x gens
    section_gen: dict  # support index -> generator position used to lift


def _member_data(family: Family, a: int) -> _MemberData:
    hit = family._pres.get(a)
    if hit is not None:
        return hit
    P = family.poset
    X = family.modules[a]
    pres = minimal_presentation(X)
    gens = [P._idx(g) for g in pres.gens]
    rels = [P._idx(r) for r in pres.rels]
    support = [i for i in range(len(P)) if X.dims[i]]
    section = {}
    for x in support:
        for k, g in enumerate(gens):
            if P.le[g, x]:
                section[x] = k
                break
    mat = pres.matrix
    data = _MemberData(support, gens, rels, mat, section)
    family._pres[a] = data
    return data


def hom_space(family: Family, a: int, M: PersModule) -> np.ndarray:
    """Hom(member a, M) as columns over the stacked values M(x), x in the support of a."""
    p = M.p
    d = _member_data(family, a)
    offs, total = [], 0
    for g in d.gens:
        offs.append(total)
        total += M.dims[g]
    L = sum(M.dims[x] for x in d.support)
    if total == 0:
        return la.zeros(L, 0)
    rows = []
    for j, r in enumerate(d.rels):
        if M.dims[r] == 0:
            continue
        block = la.zeros(M.dims[r], total)
        for i, g in enumerate(d.gens):
            c = d.matrix[j, i]
            if c and M.dims[g]:
                block[:, offs[i]:offs[i] + M.dims[g]] = np.mod(c * M.transition(g, r), p)
        rows.append(block)
    if rows:
        W = la.kernel_basis(np.concatenate(rows, axis=0), p)
    else:
        W = la.identity(total)
    h = W.shape[1]
    out = la.zeros(L, h)
    if h == 0:
        return out
    r0 = 0
    for x in d.support:
        dx = M.dims[x]
        if dx:
            i = d.section_gen[x]
            g = d.gens[i]
            wg = W[offs[i]:offs[i] + M.dims[g]]
            out[r0:r0 + dx] = la.matmul(M.transition(g, x), wg, p)
        r0 += dx
    return out


def _row_offsets(support: list, M: PersModule) -> dict:
    offs, r = {}, 0
    for x in support:
        offs[x] = r
        r += M.dims[x]
    return offs


def _hom_vectors_to_morphisms(family: Family, a: int, M: PersModule, H: np.ndarray) -> list[ModMorphism]:
    X = family.modules[a]
    d = _member_data(family, a)
    offs = _row_offsets(d.support, M)
    out = []
    for c in range(H.shape[1]):
        mats = [la.zeros(M.dims[i], X.dims[i]) for i in range(len(M.dims))]
        for x in d.support:
            mats[x] = H[offs[x]:offs[x] + M.dims[x], c:c + 1].copy()
        out.append(ModMorphism(X, M, mats, check=False))
    return out


def member_hom_basis(family: Family, a: int, M: PersModule) -> list[ModMorphism]:
    return _hom_vectors_to_morphisms(family, a, M, hom_space(family, a, M))


# ---------------------------------------------------------------------------
# covers and resolutions


@dataclass
class Cover:
    members: list  # member index per summand, nondecreasing
    source: PersModule
    map: ModMorphism

    def multiplicities(self) -> Counter:
        return Counter(self.members)


def _require_projectives(family: Family) -> None:
    if not family.contains_projectives():
        raise FamilyError("family must contain every indecomposable projective")


def cover(M: PersModule, family: Family) -> Cover:
    """Minimal right add(family)-approximation of M."""
    _require_projectives(family)
    P, p = family.poset, M.p
    msupp = np.array([d > 0 for d in M.dims])
    spaces = {}
    for a in range(len(family)):
        if (family.masks[a] & msupp).any():
            H = hom_space(family, a, M)
            if H.shape[1]:
                spaces[a] = H
    arrows = family.arrows()
    chosen = []
    for a in sorted(spaces):
        H = spaces[a]
        d = _member_data(family, a)
        offs = _row_offsets(d.support, M)
        rad_cols = []
        for b, scal in arrows[a]:
            Hb = spaces.get(b)
            if Hb is None:
                continue
            db = _member_data(family, b)
            offb = _row_offsets(db.support, M)
            block = la.zeros(H.shape[0], Hb.shape[1])
            for x in d.support:
                if scal[x] and M.dims[x]:
                    block[offs[x]:offs[x] + M.dims[x]] = np.mod(scal[x] * Hb[offb[x]:offb[x] + M.dims[x]], p)
            rad_cols.append(block)
        R = np.concatenate(rad_cols, axis=1) if rad_cols else la.zeros(H.shape[0], 0)
        R = la.image_basis(R, p) if R.shape[1] else R
        for c in la.extend_columns(R, H, p):
            chosen.append((a, H[:, c]))
    members = [a for a, _ in chosen]
    mods = [family.modules[a] for a in members]
    U = direct_sum(mods, P, p)
    mats = []
    for x in range(len(P)):
        cols = []
        for a, v in chosen:
            if family.masks[a][x]:
                d = _member_data(family, a)
                offs = _row_offsets(d.support, M)
                cols.append(v[offs[x]:offs[x] + M.dims[x]].reshape(-1, 1))
        mats.append(np.concatenate(cols, axis=1) if cols else la.zeros(M.dims[x], 0))
    q = ModMorphism(U, M, mats, check=False)
    return Cover(members, U, q)


@dataclass
class Resolution:
    target: PersModule
    family: Family
    terms: list  # list of member-index lists
    modules: list  # term modules U_i
    diffs: list  # diffs[0]: U_0 → M, diffs[i]: U_i → U_{i-1}
    complete: bool
    max_len: int
    minimal: bool = True

    @property
    def truncated(self) -> bool:
        return not self.complete

    @property
    def length(self) -> int:
        """Index of the last nonzero term (0 for the zero module)."""
        nz = [i for i, t in enumerate(self.terms) if t]
        return nz[-1] if nz else 0

    def multiplicities(self, i: int) -> Counter:
        return Counter(self.terms[i])

    def describe(self) -> list:
        out = []
        for t in self.terms:
            cnt = Counter(t)
            out.append([{"member": self.family.members[a].describe(), "multiplicity": cnt[a]}
                        for a in sorted(cnt)])
        return out


def default_max_len(P: FinitePoset) -> int:
    return 2 * len(P)


def minimal_resolution(M: PersModule, family: Family, max_len: int | None = None) -> Resolution:
    """Iterated minimal covers of kernels; stops at a zero kernel or after ``max_len`` steps."""
    _require_projectives(family)
    P = family.poset
    if max_len is None:
        max_len = default_max_len(P)
    terms, mods, diffs = [], [], []
    current, incl = M, None
    complete = False
    for i in range(max_len + 1):
        if current.is_zero():
            complete = True
            break
        cv = cover(current, family)
        terms.append(cv.members)
        mods.append(cv.source)
        diffs.append(cv.map if incl is None else compose(incl, cv.map))
        current, incl = kernel(cv.map)
    else:
        complete = current.is_zero()
    if not terms:
        terms, mods = [[]], [direct_sum([], P, M.p)]
    return Resolution(M, family, terms, mods, diffs, complete, max_len)


def x_dimension(M: PersModule, family: Family, max_len: int | None = None) -> int:
    res = minimal_resolution(M, family, max_len)
    if not res.complete:
        raise ResolutionTruncated(res)
    return res.length


# ---------------------------------------------------------------------------
# exactness


@dataclass
class ShortExactSeq:
    f: ModMorphism
    g: ModMorphism

    def __post_init__(self):
        p = self.f.p
        if self.f.target.dims != self.g.source.dims:
            raise ModuleError("f and g are not composable")
        for a, b in zip(self.f.mats, self.g.mats):
            if a.shape[1] and la.rank(a, p) != a.shape[1]:
                raise ModuleError("f is not injective")
            if b.shape[0] and la.rank(b, p) != b.shape[0]:
                raise ModuleError("g is not surjective")
            if a.size and b.size and np.any(la.matmul(b, a, p)):
                raise ModuleError("g ∘ f is not zero")
            if a.shape[1] + b.shape[0] != b.shape[1]:
                raise ModuleError("image of f differs from kernel of g")


def is_fx_epi(g: ModMorphism, family: Family) -> bool:
    """Hom(X, g) is surjective for every member X."""
    M, N = g.source, g.target
    p = g.p
    nsupp = np.array([d > 0 for d in N.dims])
    for a in range(len(family)):
        if not (family.masks[a] & nsupp).any():
            continue
        HN = hom_space(family, a, N)
        if HN.shape[1] == 0:
            continue
        HM = hom_space(family, a, M)
        d = _member_data(family, a)
        offM = _row_offsets(d.support, M)
        img = la.zeros(HN.shape[0], HM.shape[1])
        r0 = 0
        for x in d.support:
            dx = N.dims[x]
            if dx and M.dims[x]:
                img[r0:r0 + dx] = la.matmul(g.mats[x], HM[offM[x]:offM[x] + M.dims[x]], p)
            r0 += dx
        if la.rank(img, p) < HN.shape[1]:
            return False
    return True


def is_fx_exact(seq: ShortExactSeq, family: Family) -> bool:
    return is_fx_epi(seq.g, family)


def resolution_is_admissible(res: Resolution) -> bool:
    """Every step U_i → image is an admissible epimorphism."""
    for d in res.diffs:
        _, epi, _ = image(d)
        if not is_fx_epi(epi, res.family):
            return False
    return True


# ---------------------------------------------------------------------------
# Grothendieck classes


@dataclass
class GrothClass:
    family: Family
    coeffs: dict  # member index -> nonzero integer

    def describe(self) -> list:
        return [{"member": self.family.members[a].describe(), "coefficient": c}
                for a, c in sorted(self.coeffs.items())]

    def __add__(self, other: "GrothClass") -> "GrothClass":
        out = Counter(self.coeffs)
        out.update(other.coeffs)
        return GrothClass(self.family, {k: v for k, v in out.items() if v})

    def __neg__(self) -> "GrothClass":
        return GrothClass(self.family, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other: "GrothClass") -> "GrothClass":
        return self + (-other)

    def is_zero(self) -> bool:
        return not self.coeffs


def groth_class(M: PersModule, family: Family, max_len: int | None = None,
                resolution: Resolution | None = None) -> GrothClass:
    res = resolution or minimal_resolution(M, family, max_len)
    if not res.complete:
        raise ResolutionTruncated(res)
    tot = Counter()
    for i, t in enumerate(res.terms):
        for a in t:
            tot[a] += (-1) ** i
    return GrothClass(family, {a: c for a, c in sorted(tot.items()) if c})


@dataclass
class SignedDecomposition:
    plus: Counter
    minus: Counter
    family: Family

    def describe(self) -> dict:
        def part(cnt):
            return [{"member": self.family.members[a].describe(), "multiplicity": m}
                    for a, m in sorted(cnt.items())]

        return {"plus": part(self.plus), "minus": part(self.minus)}


def minimal_signed_decomposition(M: PersModule, family: Family, max_len: int | None = None,
                                 resolution: Resolution | None = None) -> SignedDecomposition:
    cls = groth_class(M, family, max_len, resolution)
    plus = Counter({a: c for a, c in cls.coeffs.items() if c > 0})
    minus = Counter({a: -c for a, c in cls.coeffs.items() if c < 0})
    return SignedDecomposition(plus, minus, family)


# ---------------------------------------------------------------------------
# invariants


def dim_vector(M: PersModule) -> dict:
    return {x: d for x, d in zip(M.poset.elements, M.dims)}


def rank_invariant(M: PersModule) -> dict:
    """rank M(x, y) for every comparable pair x ≤ y."""
    P, p = M.poset, M.p
    out = {}
    for i in range(len(P)):
        for j in np.flatnonzero(P.le[i]):
            j = int(j)
            if M.dims[i] == 0 or M.dims[j] == 0:
                r = 0
            else:
                r = la.rank(M.transition(i, j), p)
            out[(P.elements[i], P.elements[j])] = r
    return out


def chain_order(P: FinitePoset) -> list:
    if not P.is_chain():
        raise FamilyError("poset is not totally ordered")
    return [P.elements[i] for i in P.topo]


def barcode_1d(M: PersModule) -> list[tuple[Spread, int]]:
    """Interval decomposition over a chain as (bar, multiplicity) pairs.

    A bar is the hook ⟨e_i, e_{j+1}⟨ or the upset ⟨e_i, ∞⟨ when it reaches the top.
    """
    P = M.poset
    order = chain_order(P)
    n = len(order)
    rk = rank_invariant(M)

    def r(i, j):
        if i < 0 or j >= n or i > j:
            return 0
        return rk[(order[i], order[j])]

    bars = []
    for i in range(n):
        for j in range(i, n):
            m = r(i, j) - r(i - 1, j) - r(i, j + 1) + r(i - 1, j + 1)
            if m:
                bars.append((make_spread(P, order[i:j + 1], check=False), m))
    return bars


def bars_rank_invariant(P: FinitePoset, bars: Iterable[tuple[Spread, int]]) -> dict:
    out = {}
    for i in range(len(P)):
        for j in np.flatnonzero(P.le[i]):
            out[(P.elements[i], P.elements[int(j)])] = 0
    for s, m in bars:
        for x in s.support:
            for y in s.support:
                if P.leq(x, y):
                    out[(x, y)] += m
    return out


def dim_hom_vector(M: PersModule, probes: Family | Sequence[PersModule]) -> list[int]:
    if isinstance(probes, Family):
        return [hom_space(probes, a, M).shape[1] for a in range(len(probes))]
    return [len(hom_basis(X, M)) for X in probes]


# ---------------------------------------------------------------------------
# relative projectivity and dimension scans


def is_relative_projective(Z: PersModule, family: Family) -> bool:
    """Whether the minimal cover U → Z admits a section."""
    cv = cover(Z, family)
    p = Z.p
    basis = hom_basis(Z, cv.source)
    if not basis:
        return Z.is_zero()
    cols = [compose(cv.map, s).flat() for s in basis]
    A = np.array(cols, dtype=np.int64).T
    b = identity_morphism(Z).flat()
    return la.solve(A, b, p) is not None


def in_add_family(Z: PersModule, family: Family) -> bool:
    """Z is thin with connected support equal to a member (used for spread modules)."""
    if any(d > 1 for d in Z.dims):
        return False
    return Z.support() in family.index


@dataclass
class ScanResult:
    max_dim: int
    witness: str
    witness_module: PersModule | None
    histogram: dict = field(default_factory=dict)
    exceeded: list = field(default_factory=list)


def default_candidates(P: FinitePoset, n_random: int = 100, seed: int = 0, p: int | None = None,
                       include_spreads: bool = True) -> list[tuple[str, PersModule]]:
    cands = [(f"simple {x}", simple(P, x, p)) for x in P.elements]
    if include_spreads:
        for s in all_spreads(P):
            cands.append((f"spread {sorted(s.support, key=P._idx)}", indicator_module(P, s.support, p)))
    rng = np.random.default_rng(seed)
    for k in range(n_random):
        ng = int(rng.integers(1, 5))
        nr = int(rng.integers(0, 5))
        s = int(rng.integers(0, 2**31))
        cands.append((f"random seed={s} gens={ng} rels={nr}", random_module(P, ng, nr, s, p)))
    return cands


def family_gl_dim_scan(P: FinitePoset, family: Family, candidates=None, n_random: int = 100, seed: int = 0,
                       max_len: int | None = None) -> ScanResult:
    """Largest relative dimension among the candidates; a lower bound for the global dimension."""
    if candidates is None:
        candidates = default_candidates(P, n_random, seed, family.p)
    best, wname, wmod = -1, "", None
    hist: Counter = Counter()
    for name, M in candidates:
        d = x_dimension(M, family, max_len)
        hist[d] += 1
        if d > best:
            best, wname, wmod = d, name, M
    return ScanResult(best, wname, wmod, dict(sorted(hist.items())))


# ---------------------------------------------------------------------------
# duality, envelopes and the Koszul witness


def opposite(P: FinitePoset) -> tuple[FinitePoset, dict]:
    """The opposite poset and the point bijection; grids stay grids via negated coordinates."""
    if isinstance(P, GridPoset):
        Q = GridPoset([[-v for v in a] for a in P.axes])
        return Q, {x: tuple(-v for v in x) for x in P.elements}
    Q = FinitePoset(P.elements, [(y, x) for x, y in P.hasse])
    return Q, {x: x for x in P.elements}


def dual_module(M: PersModule, Pop: FinitePoset | None = None, phi: dict | None = None) -> PersModule:
    """D M = Hom_K(M, K) as a module over the opposite poset."""
    P = M.poset
    if Pop is None:
        Pop, phi = opposite(P)
    dims = [0] * len(Pop)
    for i, x in enumerate(P.elements):
        dims[Pop._idx(phi[x])] = M.dims[i]
    maps = {}
    for (i, j) in P.hasse_idx:
        a = Pop._idx(phi[P.elements[j]])
        b = Pop._idx(phi[P.elements[i]])
        maps[(a, b)] = M.maps[(i, j)].T.copy()
    return PersModule(Pop, dims, maps, p=M.p, check=False)


def dual_family(family: Family, Pop: FinitePoset, phi: dict) -> Family:
    members = [make_spread(Pop, [phi[x] for x in s.support], check=False) for s in family.members]
    return Family(Pop, members, kind=f"dual {family.kind}", p=family.p)


def relative_codimension(M: PersModule, family: Family, max_len: int | None = None) -> int:
    """Length of the minimal coresolution of M by left add(family)-approximations.

    Computed as the relative dimension of the dual module over the opposite
    poset with respect to the dual family.
    """
    Pop, phi = opposite(M.poset)
    return x_dimension(dual_module(M, Pop, phi), dual_family(family, Pop, phi), max_len)


def cokernel_module(f: ModMorphism) -> PersModule:
    return cokernel(f)[0]


def koszul_witness_dimension(n: int, kind: str = "single_source_spreads", p: int | None = None) -> dict:
    """Projective dimension of the simple top witnessed by the staircase Koszul complex.

    The top T of Hom(I_S, G) has the presentation Hom(U^1, G) → Hom(U^0, G) → T,
    so its second syzygy is Hom(C, G) with C = coker(d^0) and
    pd T = 2 + (relative codimension of C).  The codimension is computed from
    minimal envelopes, independently of the higher Koszul terms.
    """
    from .spreadcalc import koszul_complex

    cx = koszul_complex(n, p)
    P = cx.poset
    fam = make_family(P, kind, p=cx.terms[0].p)
    C = cokernel_module(cx.diffs[0])
    codim = relative_codimension(C, fam)
    return {"n": n, "family": kind, "codimension": codim, "projective_dimension": 2 + codim}
