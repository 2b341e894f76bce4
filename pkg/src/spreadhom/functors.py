"""Restriction, extension and contraction between a bounding grid and aligned subgrids.

The ambient poset is modelled as an integer lattice.  Every computation runs
on an explicit finite *bound* grid, which must contain the subgrid together
with the presentation grid of every module involved.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg as la
from .poset import (
    GridPoset,
    NotInUpperSet,
    PosetError,
    antichains,
    ceil_class,
    connected_components,
    grid_closure,
    make_spread,
)
from .rep import (
    ModMorphism,
    ModuleError,
    PersModule,
    hom_components,
    indicator_module,
    minimal_presentation,
    module_from_presentation,
    random_presentation,
)
from .spreadcalc import Family, make_family


class SupportOutsideQPlus(ValueError):
    pass


@dataclass
class PresentedModule:
    """Cokernel of ⊕ P_rels → ⊕ P_gens; ``matrix`` is rels x gens."""

    gens: list
    rels: list
    matrix: np.ndarray
    p: int | None = None

    def __post_init__(self):
        self.gens = [tuple(g) for g in self.gens]
        self.rels = [tuple(r) for r in self.rels]
        self.matrix = np.asarray(self.matrix, dtype=np.int64).reshape(len(self.rels), len(self.gens))
        for r, rp in enumerate(self.rels):
            for c, gp in enumerate(self.gens):
                if self.matrix[r, c] and not all(a <= b for a, b in zip(gp, rp)):
                    raise ModuleError(f"relation at {rp} cannot involve generator at {gp}")

    @property
    def points(self) -> list:
        return self.gens + self.rels

    def realize(self, G: GridPoset) -> PersModule:
        missing = [x for x in self.points if x not in G]
        if missing:
            raise PosetError(f"grid does not contain presentation points {missing[:3]}")
        return module_from_presentation(G, self.gens, self.rels, self.matrix, self.p)

    def minimized(self) -> "PresentedModule":
        if not self.gens:
            return self
        M = self.realize(grid_closure(self.points))
        pres = minimal_presentation(M)
        return PresentedModule(pres.gens, pres.rels, pres.matrix, M.p)

    @classmethod
    def from_module(cls, M: PersModule) -> "PresentedModule":
        pres = minimal_presentation(M)
        return cls(pres.gens, pres.rels, pres.matrix, M.p)


def random_presented(G: GridPoset, n_gens: int, n_rels: int, seed: int, p: int | None = None) -> PresentedModule:
    gens, rels, mat = random_presentation(G, n_gens, n_rels, seed, p)
    return PresentedModule(gens, rels, mat, p)


def lgrid(M: PresentedModule | PersModule) -> GridPoset | None:
    """Grid closure of the points of a minimal projective presentation; None for zero."""
    if isinstance(M, PersModule):
        pres = minimal_presentation(M)
        pts = list(pres.gens) + list(pres.rels)
    else:
        pts = M.minimized().points
    if not pts:
        return None
    return grid_closure(pts)


def _require_subgrid(bound: GridPoset, Q: GridPoset) -> None:
    if not isinstance(bound, GridPoset) or not bound.contains_grid(Q):
        raise PosetError("subgrid is not contained in the bounding grid")


def restrict(M: PersModule, Q: GridPoset) -> PersModule:
    """Values of M at the points of Q, with composite structure maps."""
    _require_subgrid(M.poset, Q)
    dims = [M.dim(y) for y in Q.elements]
    maps = {}
    for (i, j) in Q.hasse_idx:
        maps[(i, j)] = M.structure_map(Q.elements[i], Q.elements[j])
    return PersModule(Q, dims, maps, p=M.p, check=False)


def extend(N: PersModule, target: GridPoset) -> PersModule:
    """Left Kan extension: value N(⌊x⌋) above Q, zero elsewhere."""
    Q = N.poset
    _require_subgrid(target, Q)
    fl = [Q.floor(x) if Q.in_upper_set(x) else None for x in target.elements]
    dims = [N.dim(f) if f is not None else 0 for f in fl]
    maps = {}
    for (i, j) in target.hasse_idx:
        if fl[i] is not None and fl[j] is not None:
            maps[(i, j)] = N.structure_map(fl[i], fl[j])
        else:
            maps[(i, j)] = la.zeros(dims[j], dims[i])
    return PersModule(target, dims, maps, p=N.p, check=False)


def extend_morphism(f: ModMorphism, target: GridPoset) -> ModMorphism:
    Q = f.source.poset
    src, tgt = extend(f.source, target), extend(f.target, target)
    mats = []
    for i, x in enumerate(target.elements):
        if Q.in_upper_set(x):
            mats.append(f.component(Q.floor(x)))
        else:
            mats.append(la.zeros(tgt.dims[i], src.dims[i]))
    return ModMorphism(src, tgt, mats, check=False)


@dataclass
class Contraction:
    module: PersModule
    canonical: dict  # bound point -> matrix M(x) → ⌊M⌋(⌊x⌋)
    sections: dict = field(repr=False, default_factory=dict)


def _class_colimit(M: PersModule, cls: list, p: int):
    """Cokernel presentation of the colimit over a class (a box of the bound grid)."""
    B = M.poset
    offs, total = {}, 0
    for x in cls:
        offs[x] = total
        total += M.dim(x)
    members = set(cls)
    rels = []
    for x in cls:
        i = B._idx(x)
        for j in B.up[i]:
            y = B.elements[j]
            if y not in members or M.dim(x) == 0:
                continue
            block = la.zeros(total, M.dim(x))
            block[offs[x]:offs[x] + M.dim(x)] = la.identity(M.dim(x))
            if M.dim(y):
                block[offs[y]:offs[y] + M.dim(y)] = np.mod(-M.maps[(i, j)], p)
            rels.append(block)
    R = np.concatenate(rels, axis=1) if rels else la.zeros(total, 0)
    if total == 0:
        return offs, la.zeros(0, 0), la.zeros(0, 0)
    img = la.image_basis(R, p) if R.shape[1] else R
    extra = la.extend_columns(img, la.identity(total), p)
    ext = la.identity(total)[:, extra]
    inv = la.inverse(np.concatenate([img, ext], axis=1), p)
    return offs, inv[img.shape[1]:], ext


def contraction(M: PersModule, Q: GridPoset) -> Contraction:
    bound = M.poset
    _require_subgrid(bound, Q)
    p = M.p
    for x in M.support():
        if not Q.in_upper_set(x):
            raise SupportOutsideQPlus(f"module is nonzero at {x}, which is not above the subgrid")
    classes, proj, sect, offs = {}, {}, {}, {}
    for y in Q.elements:
        cls = sorted(ceil_class(Q, y, bound), key=bound._idx)
        classes[y] = cls
        offs[y], proj[y], sect[y] = _class_colimit(M, cls, p)
    dims = [proj[y].shape[0] for y in Q.elements]
    maps = {}
    for (i, j) in Q.hasse_idx:
        y, y2 = Q.elements[i], Q.elements[j]
        total = sum(M.dim(x) for x in classes[y])
        phi = la.zeros(dims[j], total)
        for x in classes[y]:
            dx = M.dim(x)
            if dx == 0:
                continue
            z = bound.join(y2, x)
            dz = M.dim(z)
            if dz:
                piz = proj[y2][:, offs[y2][z]:offs[y2][z] + dz]
                phi[:, offs[y][x]:offs[y][x] + dx] = la.matmul(piz, M.structure_map(x, z), p)
        maps[(i, j)] = la.matmul(phi, sect[y], p) if dims[i] and dims[j] else la.zeros(dims[j], dims[i])
    C = PersModule(Q, dims, maps, p=p, check=False)
    canon = {}
    for y in Q.elements:
        for x in classes[y]:
            canon[x] = proj[y][:, offs[y][x]:offs[y][x] + M.dim(x)]
    return Contraction(C, canon, {y: (offs[y], proj[y], sect[y]) for y in Q.elements})


def contract(M: PersModule, Q: GridPoset) -> PersModule:
    """⌊M⌋_Q(y) = colimit of M over the class of y inside the bounding grid."""
    return contraction(M, Q).module


def contract_morphism(f: ModMorphism, Q: GridPoset) -> ModMorphism:
    cs, ct = contraction(f.source, Q), contraction(f.target, Q)
    bound = f.source.poset
    p = f.p
    mats = []
    for y in Q.elements:
        offs_s, _, sect_s = cs.sections[y]
        cls = sorted(ceil_class(Q, y, bound), key=bound._idx)
        total_s = sum(f.source.dim(x) for x in cls)
        blocks = la.zeros(ct.module.dim(y), total_s)
        for x in cls:
            dx = f.source.dim(x)
            if dx and f.target.dim(x):
                blocks[:, offs_s[x]:offs_s[x] + dx] = la.matmul(ct.canonical[x], f.component(x), p)
        mats.append(la.matmul(blocks, sect_s, p) if blocks.size and sect_s.size
                    else la.zeros(ct.module.dim(y), cs.module.dim(y)))
    return ModMorphism(cs.module, ct.module, mats, check=False)


def unit(M: PersModule, Q: GridPoset) -> ModMorphism:
    """η_M : M → ⌈⌊M⌋_Q⌉_Q built from the canonical maps into the colimits."""
    c = contraction(M, Q)
    E = extend(c.module, M.poset)
    mats = []
    for i, x in enumerate(M.poset.elements):
        if x in c.canonical:
            mats.append(c.canonical[x])
        else:
            mats.append(la.zeros(E.dims[i], M.dims[i]))
    return ModMorphism(M, E, mats)


def counit(M: PersModule, Q: GridPoset) -> ModMorphism:
    """ε_M : ⌈M|_Q⌉_Q → M with components M(⌊x⌋, x)."""
    bound = M.poset
    E = extend(restrict(M, Q), bound)
    mats = []
    for i, x in enumerate(bound.elements):
        if Q.in_upper_set(x):
            mats.append(M.structure_map(Q.floor(x), x))
        else:
            mats.append(la.zeros(M.dims[i], E.dims[i]))
    return ModMorphism(E, M, mats)


# ---------------------------------------------------------------------------
# extended projective classes


def thin_summands(M: PersModule) -> list[frozenset]:
    """Supports of the indecomposable summands of a module of dimension at most one everywhere."""
    P = M.poset
    if any(d > 1 for d in M.dims):
        raise ModuleError("module is not thin")
    supp = [i for i, d in enumerate(M.dims) if d]
    parent = {i: i for i in supp}

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for (i, j) in P.hasse_idx:
        if M.dims[i] and M.dims[j] and M.maps[(i, j)][0, 0]:
            parent[find(i)] = find(j)
    groups: dict = {}
    for i in supp:
        groups.setdefault(find(i), []).append(P.elements[i])
    return sorted((frozenset(g) for g in groups.values()), key=lambda s: sorted(P._idx(x) for x in s))


def extension_support(Q: GridPoset, T, bound: GridPoset) -> frozenset:
    """Support of ⌈I_T⌉_Q inside the bound."""
    T = frozenset(T)
    return frozenset(x for x in bound.elements if Q.in_upper_set(x) and Q.floor(x) in T)


@dataclass
class ExtendedClassReport:
    passed: bool
    conditions: dict
    first_violation: dict | None

    def to_dict(self) -> dict:
        return {"passed": self.passed, "conditions": self.conditions, "first_violation": self.first_violation}


def _pts(s) -> list:
    return [list(x) for x in sorted(s)]


def check_extended_class(bound: GridPoset, grids: Sequence[GridPoset], kind: str,
                         test_modules: Sequence[PersModule] = (), p: int | None = None) -> ExtendedClassReport:
    """Check the six extended-projective-class conditions on a finite bound.

    Condition (5) quantifies over all Q-representations N; it is checked on
    the simple Q-representations, which suffices because extension is exact
    and Hom(X, −) is left exact.  Condition (6) is checked only for the
    supplied test modules.
    """
    fam = make_family(bound, kind, p=p)
    grid_fams = []
    for Q in grids:
        _require_subgrid(bound, Q)
        grid_fams.append(make_family(Q, kind, p=p))
    cond = {str(k): True for k in range(1, 7)}
    violations = []

    def fail(k, witness):
        if cond[str(k)]:
            cond[str(k)] = False
            violations.append({"condition": k, "witness": witness})

    covered = set()
    for Q in grids:
        covered |= {x for x in bound.elements if Q.in_upper_set(x)}
    # (1)
    for x in bound.elements:
        if bound.upset([x]) not in fam.index:
            fail(1, {"projective_at": list(x)})
            break
    # (2)
    for Q, fq in zip(grids, grid_fams):
        miss = [y for y in Q.elements if Q.upset([y]) not in fq.index]
        if miss:
            fail(2, {"grid": Q.describe(), "projective_at": list(miss[0])})
            break
    # (3)
    extended = set()
    for Q, fq in zip(grids, grid_fams):
        for T in fq.members:
            for comp in connected_components(bound, extension_support(Q, T.support, bound)):
                extended.add(comp)
                if comp not in fam.index and cond["3"]:
                    fail(3, {"grid": Q.describe(), "extended_member": _pts(T.support), "summand": _pts(comp)})
    for s in fam.members:
        if s.support not in extended:
            fail(3, {"member_not_extended": _pts(s.support)})
            break
    # (4)
    for Q, fq in zip(grids, grid_fams):
        plus = {x for x in bound.elements if Q.in_upper_set(x)}
        got = set()
        for s, X in zip(fam.members, fam.modules):
            if not s.support <= plus:
                continue
            for comp in thin_summands(contract(X, Q)):
                got.add(comp)
                if comp not in fq.index and cond["4"]:
                    fail(4, {"grid": Q.describe(), "member": _pts(s.support), "summand": _pts(comp)})
        for t in fq.members:
            if t.support not in got:
                fail(4, {"grid": Q.describe(), "member_not_reached": _pts(t.support)})
                break
    # (5)
    for Q in grids:
        plus = {x for x in bound.elements if Q.in_upper_set(x)}
        boxes = {y: ceil_class(Q, y, bound) for y in Q.elements}
        for s in fam.members:
            if s.support <= plus or not cond["5"]:
                continue
            for y in Q.elements:
                if hom_components(bound, s.support, boxes[y]):
                    fail(5, {"grid": Q.describe(), "member": s.describe(), "member_support": _pts(s.support),
                             "simple_at": list(y)})
                    break
    # (6)
    for k, M in enumerate(test_modules):
        L = lgrid(M)
        if L is not None and not any(Q.contains_grid(L) for Q in grids):
            fail(6, {"test_module": k, "presentation_grid": L.describe()})
    if covered != set(bound.elements):
        violations.append({"condition": "covering", "witness": {"uncovered": _pts(set(bound.elements) - covered)}})
    violations.sort(key=lambda v: (v["condition"] if isinstance(v["condition"], int) else 0))
    first = violations[0] if violations else None
    return ExtendedClassReport(first is None, cond, first)


# ---------------------------------------------------------------------------
# precover obstruction for fp-upsets


@dataclass
class PrecoverProbe:
    hook: list
    candidates: list
    chain: list
    maximal: list
    maximal_touches_bound: bool
    ambient_has_minimum: bool
    bound_cover: list

    @property
    def genuine_precover(self) -> bool:
        return self.ambient_has_minimum or not self.maximal_touches_bound

    def to_dict(self) -> dict:
        return {
            "hook": self.hook,
            "candidates": self.candidates,
            "chain": self.chain,
            "chain_length": len(self.chain),
            "maximal": self.maximal,
            "maximal_touches_bound": self.maximal_touches_bound,
            "ambient_has_minimum": self.ambient_has_minimum,
            "genuine_precover": self.genuine_precover,
            "bound_cover": self.bound_cover,
        }


def upset_precover_probe(bound: GridPoset, r: int, s: int, t: int, ambient_has_minimum: bool = False,
                         p: int | None = None) -> PrecoverProbe:
    """Factorization chains of maps from fp-upsets onto the hook ⟨(r,t),(s,t)⟨.

    Candidates are upsets generated by (r,t) together with points whose first
    coordinate is at least s.  Each map h^A is the indicator morphism that is
    nonzero at (r,t).  When the largest candidates reach the lower edge of the
    bound, enlarging the bound downward produces strictly larger ones.
    """
    if bound.dim != 2:
        raise PosetError("the probe runs on a two-dimensional grid")
    if not r < s:
        raise ValueError("need r < s")
    a, b = (r, t), (s, t)
    if a not in bound or b not in bound:
        raise PosetError("hook endpoints are outside the bound")
    X = bound.upset([a]) - bound.upset([b])
    cands = []
    for A in antichains(bound):
        if a in A and all(x == a or x[0] >= s for x in A):
            up = bound.upset(A)
            comps = [U for U in hom_components(bound, up, X) if a in U]
            if comps:
                cands.append((A, up, comps[0]))
    cands.sort(key=lambda c: (len(c[1]), [bound._idx(x) for x in c[0]]))
    n = len(cands)

    def factors(i, j):  # h^{A_i} = h^{A_j} ∘ inclusion
        ui, uj = cands[i][1], cands[j][1]
        return ui < uj and (cands[j][2] & ui) == cands[i][2]

    best = [1] * n
    prev = [-1] * n
    for j in range(n):
        for i in range(j):
            if factors(i, j) and best[i] + 1 > best[j]:
                best[j], prev[j] = best[i] + 1, i
    end = max(range(n), key=lambda k: (best[k], -k)) if n else -1
    chain = []
    while end >= 0:
        chain.append(end)
        end = prev[end]
    chain.reverse()
    maximal = [k for k in range(n) if not any(factors(k, j) for j in range(n))]
    low = bound.axes[1][0]
    touches = any(x[1] == low for k in maximal for x in cands[k][0] if x != a)
    from .rha import cover

    fam = make_family(bound, "fp_upsets", p=p)
    cv = cover(indicator_module(bound, X, p=fam.p), fam)
    return PrecoverProbe(
        hook=[list(a), list(b)],
        candidates=[[list(x) for x in c[0]] for c in cands],
        chain=[[list(x) for x in cands[k][0]] for k in chain],
        maximal=[[list(x) for x in cands[k][0]] for k in maximal],
        maximal_touches_bound=touches,
        ambient_has_minimum=ambient_has_minimum,
        bound_cover=[fam.members[m].describe() for m in cv.members],
    )
