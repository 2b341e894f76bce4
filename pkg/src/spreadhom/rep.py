"""Persistence modules over finite posets and their morphisms."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import linalg as la
from .poset import (
    FinitePoset,
    GridPoset,
    Point,
    PosetError,
    Spread,
    connected_components,
    make_spread,
)


class ModuleError(ValueError):
    pass


class PersModule:
    """A representation of a finite poset over F_p.

    ``dims[i]`` is the dimension at element index ``i`` and ``maps[(i, j)]`` is
    the structure map along the Hasse edge ``i ⋖ j`` as a ``dims[j] x dims[i]``
    matrix.  Composites along longer paths are computed on demand and cached.
    """

    def __init__(self, poset: FinitePoset, dims: Sequence[int], maps: dict, p: int | None = None,
                 check: bool = True):
        self.poset = poset
        self.p = la.default_prime() if p is None else la.validate_prime(p)
        self.dims = tuple(int(d) for d in dims)
        if len(self.dims) != len(poset) or any(d < 0 for d in self.dims):
            raise ModuleError("dimension vector does not match the poset")
        self.maps: dict = {}
        for i, j in poset.hasse_idx:
            m = maps.get((i, j))
            shape = (self.dims[j], self.dims[i])
            if m is None:
                if shape[0] and shape[1]:
                    raise ModuleError(f"missing structure map on {poset.elements[i]} -> {poset.elements[j]}")
                m = la.zeros(*shape)
            arr = np.asarray(m, dtype=np.int64)
            if arr.size != shape[0] * shape[1] or (arr.size and arr.ndim == 2 and arr.shape != shape):
                raise ModuleError(f"structure map on {poset.elements[i]} -> {poset.elements[j]} has wrong shape")
            self.maps[(i, j)] = la.as_field(arr.reshape(shape), self.p)
        extra = set(maps) - set(self.maps)
        if extra:
            raise ModuleError(f"maps given on non-cover pairs: {sorted(extra)[:3]}")
        self._trans: dict = {}
        if check:
            self.validate()

    @classmethod
    def from_points(cls, P: FinitePoset, dims: dict, maps: dict | None = None, p: int | None = None,
                    check: bool = True) -> "PersModule":
        dvec = [0] * len(P)
        for x, d in dims.items():
            dvec[P._idx(x)] = int(d)
        mp = {}
        for (x, y), m in (maps or {}).items():
            mp[(P._idx(x), P._idx(y))] = np.asarray(m, dtype=np.int64)
        return cls(P, dvec, mp, p=p, check=check)

    def __repr__(self) -> str:
        return f"PersModule(total_dim={self.total_dim}, points={len(self.poset)})"

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def is_zero(self) -> bool:
        return self.total_dim == 0

    def dim(self, x: Point) -> int:
        return self.dims[self.poset._idx(x)]

    def support(self) -> frozenset:
        return frozenset(x for x, d in zip(self.poset.elements, self.dims) if d)

    def transition(self, i: int, j: int) -> np.ndarray:
        """Structure map between element indices ``i <= j``."""
        key = (i, j)
        hit = self._trans.get(key)
        if hit is not None:
            return hit
        if i == j:
            out = la.identity(self.dims[i])
        else:
            P = self.poset
            if not P.le[i, j]:
                raise ModuleError(f"{P.elements[i]} is not below {P.elements[j]}")
            if self.dims[i] == 0 or self.dims[j] == 0:
                out = la.zeros(self.dims[j], self.dims[i])
            else:
                k = next(k for k in P.up[i] if P.le[k, j])
                out = la.matmul(self.transition(k, j), self.maps[(i, k)], self.p)
        self._trans[key] = out
        return out

    def structure_map(self, x: Point, y: Point) -> np.ndarray:
        return self.transition(self.poset._idx(x), self.poset._idx(y))

    def validate(self) -> None:
        """Check that all Hasse-path composites between comparable points agree."""
        P = self.poset
        n = len(P)
        for i in range(n):
            if self.dims[i] == 0:
                continue
            for j in np.flatnonzero(P.le[i]):
                j = int(j)
                if j == i or self.dims[j] == 0:
                    continue
                ref = self.transition(i, j)
                for k in P.up[i]:
                    if P.le[k, j]:
                        alt = la.matmul(self.transition(k, j), self.maps[(i, k)], self.p)
                        if not np.array_equal(alt, ref):
                            raise ModuleError(
                                f"not functorial: paths from {P.elements[i]} to {P.elements[j]} disagree")

    def __eq__(self, other) -> bool:
        if not isinstance(other, PersModule):
            return NotImplemented
        return (self.poset == other.poset and self.p == other.p and self.dims == other.dims
                and all(np.array_equal(self.maps[e], other.maps[e]) for e in self.maps))

    __hash__ = None


class ModMorphism:
    """A natural transformation; ``mats[i]`` maps source(i) to target(i)."""

    def __init__(self, source: PersModule, target: PersModule, mats: Sequence[np.ndarray], check: bool = True):
        if source.poset is not target.poset and source.poset != target.poset:
            raise ModuleError("morphism between modules over different posets")
        self.source = source
        self.target = target
        p = source.p
        self.mats = []
        for i, m in enumerate(mats):
            shape = (target.dims[i], source.dims[i])
            m = la.as_field(m, p).reshape(shape)
            self.mats.append(m)
        if len(self.mats) != len(source.dims):
            raise ModuleError("wrong number of components")
        if check:
            self.validate()

    @property
    def p(self) -> int:
        return self.source.p

    def validate(self) -> None:
        S, T, p = self.source, self.target, self.p
        for (i, j) in S.poset.hasse_idx:
            lhs = la.matmul(T.maps[(i, j)], self.mats[i], p)
            rhs = la.matmul(self.mats[j], S.maps[(i, j)], p)
            if not np.array_equal(lhs, rhs):
                P = S.poset
                raise ModuleError(f"not natural on {P.elements[i]} -> {P.elements[j]}")

    def component(self, x: Point) -> np.ndarray:
        return self.mats[self.source.poset._idx(x)]

    def is_zero(self) -> bool:
        return not any(np.any(m) for m in self.mats)

    def is_injective(self) -> bool:
        return all(la.rank(m, self.p) == m.shape[1] for m in self.mats)

    def is_surjective(self) -> bool:
        return all(la.rank(m, self.p) == m.shape[0] for m in self.mats)

    def is_iso(self) -> bool:
        return all(m.shape[0] == m.shape[1] and la.rank(m, self.p) == m.shape[0] for m in self.mats)

    def flat(self) -> np.ndarray:
        """All components concatenated row-major; a coordinate vector in the ambient Hom space."""
        if not self.mats:
            return la.zeros(0, 1)[:, 0]
        return np.concatenate([m.reshape(-1) for m in self.mats])

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModMorphism):
            return NotImplemented
        return all(np.array_equal(a, b) for a, b in zip(self.mats, other.mats))

    __hash__ = None


# ---------------------------------------------------------------------------
# morphism algebra


def compose(g: ModMorphism, f: ModMorphism) -> ModMorphism:
    """g ∘ f."""
    p = f.p
    return ModMorphism(f.source, g.target, [la.matmul(b, a, p) for a, b in zip(f.mats, g.mats)], check=False)


def add(f: ModMorphism, g: ModMorphism) -> ModMorphism:
    return ModMorphism(f.source, f.target, [np.mod(a + b, f.p) for a, b in zip(f.mats, g.mats)], check=False)


def scale(f: ModMorphism, c: int) -> ModMorphism:
    return ModMorphism(f.source, f.target, [np.mod(a * c, f.p) for a in f.mats], check=False)


def linear_combination(basis: Sequence[ModMorphism], coeffs: Sequence[int], source=None, target=None) -> ModMorphism:
    if not basis:
        return zero_morphism(source, target)
    p = basis[0].p
    mats = [la.zeros(*m.shape) for m in basis[0].mats]
    for f, c in zip(basis, coeffs):
        mats = [np.mod(a + int(c) * b, p) for a, b in zip(mats, f.mats)]
    return ModMorphism(basis[0].source, basis[0].target, mats, check=False)


def zero_morphism(source: PersModule, target: PersModule) -> ModMorphism:
    return ModMorphism(source, target, [la.zeros(t, s) for s, t in zip(source.dims, target.dims)], check=False)


def identity_morphism(M: PersModule) -> ModMorphism:
    return ModMorphism(M, M, [la.identity(d) for d in M.dims], check=False)


# ---------------------------------------------------------------------------
# constructions


def zero_module(P: FinitePoset, p: int | None = None) -> PersModule:
    return PersModule(P, [0] * len(P), {}, p=p, check=False)


def indicator_module(P: FinitePoset, support: Iterable[Point], p: int | None = None) -> PersModule:
    """Indicator representation of a convex set (identity maps inside, zero elsewhere)."""
    m = P.mask(support)
    dims = m.astype(int).tolist()
    maps = {(i, j): la.identity(1) for (i, j) in P.hasse_idx if m[i] and m[j]}
    return PersModule(P, dims, maps, p=p, check=False)


def spread_module(P: FinitePoset, S: Spread | Iterable[Point], p: int | None = None) -> PersModule:
    support = S.support if isinstance(S, Spread) else make_spread(P, S).support
    return indicator_module(P, support, p=p)


def projective(P: FinitePoset, x: Point, p: int | None = None) -> PersModule:
    return indicator_module(P, P.upset([x]), p=p)


def simple(P: FinitePoset, x: Point, p: int | None = None) -> PersModule:
    return indicator_module(P, [x], p=p)


def direct_sum(mods: Sequence[PersModule], P: FinitePoset | None = None, p: int | None = None) -> PersModule:
    if not mods:
        if P is None:
            raise ModuleError("empty direct sum needs a poset")
        return zero_module(P, p)
    P = mods[0].poset
    dims = [sum(M.dims[i] for M in mods) for i in range(len(P))]
    maps = {e: la.block_diag([M.maps[e] for M in mods]) for e in P.hasse_idx}
    return PersModule(P, dims, maps, p=mods[0].p, check=False)


def sum_injection(mods: Sequence[PersModule], k: int, total: PersModule | None = None) -> ModMorphism:
    total = total or direct_sum(mods)
    mats = []
    for i in range(len(total.dims)):
        off = sum(M.dims[i] for M in mods[:k])
        m = la.zeros(total.dims[i], mods[k].dims[i])
        m[off:off + mods[k].dims[i]] = la.identity(mods[k].dims[i])
        mats.append(m)
    return ModMorphism(mods[k], total, mats, check=False)


def sum_projection(mods: Sequence[PersModule], k: int, total: PersModule | None = None) -> ModMorphism:
    inj = sum_injection(mods, k, total)
    return ModMorphism(inj.target, inj.source, [m.T.copy() for m in inj.mats], check=False)


def projective_sum(P: FinitePoset, points: Sequence[Point], p: int | None = None) -> PersModule:
    """⊕ P_g over the given generator points, in order.

    The basis of the value at x is the ordered list of generators below x.
    """
    idx = [P._idx(g) for g in points]
    below = [[k for k, g in enumerate(idx) if P.le[g, x]] for x in range(len(P))]
    dims = [len(b) for b in below]
    maps = {}
    for (i, j) in P.hasse_idx:
        m = la.zeros(dims[j], dims[i])
        pos = {k: r for r, k in enumerate(below[j])}
        for c, k in enumerate(below[i]):
            m[pos[k], c] = 1
        maps[(i, j)] = m
    mod = PersModule(P, dims, maps, p=p, check=False)
    mod.generator_rows = below
    return mod


def projective_sum_morphism(P: FinitePoset, src_points: Sequence[Point], tgt_points: Sequence[Point],
                            matrix, p: int | None = None, source: PersModule | None = None,
                            target: PersModule | None = None) -> ModMorphism:
    """Morphism ⊕ P_s → ⊕ P_t whose (t, s) coefficient is ``matrix[t, s]``.

    Entries may be nonzero only when ``tgt_points[t] <= src_points[s]``.
    """
    source = source or projective_sum(P, src_points, p)
    target = target or projective_sum(P, tgt_points, p)
    pr = source.p
    mat = la.as_field(np.asarray(matrix, dtype=np.int64).reshape(len(tgt_points), len(src_points)), pr)
    si = [P._idx(s) for s in src_points]
    ti = [P._idx(t) for t in tgt_points]
    for t, s in zip(*np.nonzero(mat)):
        if not P.le[ti[t], si[s]]:
            raise ModuleError(f"coefficient from generator {src_points[s]} to {tgt_points[t]} is not allowed")
    mats = [mat[np.ix_(target.generator_rows[x], source.generator_rows[x])] for x in range(len(P))]
    return ModMorphism(source, target, mats, check=False)


def kernel(f: ModMorphism) -> tuple[PersModule, ModMorphism]:
    S, p = f.source, f.p
    bases = [la.kernel_basis(m, p) if m.shape[1] else la.zeros(0, 0) for m in f.mats]
    dims = [b.shape[1] for b in bases]
    lefts = [la.left_inverse(b, p) for b in bases]
    maps = {}
    for (i, j) in S.poset.hasse_idx:
        if dims[i] and dims[j]:
            maps[(i, j)] = la.matmul(lefts[j], la.matmul(S.maps[(i, j)], bases[i], p), p)
        else:
            maps[(i, j)] = la.zeros(dims[j], dims[i])
    K = PersModule(S.poset, dims, maps, p=p, check=False)
    incl = ModMorphism(K, S, [b.reshape(S.dims[i], dims[i]) for i, b in enumerate(bases)], check=False)
    return K, incl


def cokernel(f: ModMorphism) -> tuple[PersModule, ModMorphism]:
    T, p = f.target, f.p
    projs, sections = [], []
    for m in f.mats:
        q, s = _coker_with_section(m, p)
        projs.append(q)
        sections.append(s)
    dims = [q.shape[0] for q in projs]
    maps = {}
    for (i, j) in T.poset.hasse_idx:
        if dims[i] and dims[j]:
            maps[(i, j)] = la.matmul(projs[j], la.matmul(T.maps[(i, j)], sections[i], p), p)
        else:
            maps[(i, j)] = la.zeros(dims[j], dims[i])
    C = PersModule(T.poset, dims, maps, p=p, check=False)
    return C, ModMorphism(T, C, projs, check=False)


def _coker_with_section(m: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    n = m.shape[0]
    if n == 0:
        return la.zeros(0, 0), la.zeros(0, 0)
    img = la.image_basis(m, p) if m.shape[1] else la.zeros(n, 0)
    extra = la.extend_columns(img, la.identity(n), p)
    ext = la.identity(n)[:, extra]
    basis = np.concatenate([img, ext], axis=1)
    inv = la.inverse(basis, p)
    return inv[img.shape[1]:], ext


def image(f: ModMorphism) -> tuple[PersModule, ModMorphism, ModMorphism]:
    """Image module with the epimorphism onto it and the inclusion into the target."""
    T, p = f.target, f.p
    bases = [la.image_basis(m, p) if m.size else la.zeros(m.shape[0], 0) for m in f.mats]
    lefts = [la.left_inverse(b, p) for b in bases]
    dims = [b.shape[1] for b in bases]
    maps = {}
    for (i, j) in T.poset.hasse_idx:
        if dims[i] and dims[j]:
            maps[(i, j)] = la.matmul(lefts[j], la.matmul(T.maps[(i, j)], bases[i], p), p)
        else:
            maps[(i, j)] = la.zeros(dims[j], dims[i])
    I = PersModule(T.poset, dims, maps, p=p, check=False)
    epi = ModMorphism(f.source, I, [la.matmul(l, m, p) for l, m in zip(lefts, f.mats)], check=False)
    mono = ModMorphism(I, T, bases, check=False)
    return I, epi, mono


# ---------------------------------------------------------------------------
# Hom spaces


def hom_basis(M: PersModule, N: PersModule) -> list[ModMorphism]:
    """Basis of Hom(M, N) by solving the naturality equations on all Hasse edges."""
    P, p = M.poset, M.p
    n = len(P)
    offs, total = [], 0
    for i in range(n):
        offs.append(total)
        total += M.dims[i] * N.dims[i]
    if total == 0:
        return []
    blocks = []
    for (i, j) in P.hasse_idx:
        dmi, dni, dmj, dnj = M.dims[i], N.dims[i], M.dims[j], N.dims[j]
        rows = dnj * dmi
        if rows == 0:
            continue
        eq = la.zeros(rows, total)
        if dni:
            eq[:, offs[i]:offs[i] + dni * dmi] += np.kron(N.maps[(i, j)], la.identity(dmi))
        if dmj:
            eq[:, offs[j]:offs[j] + dnj * dmj] -= np.kron(la.identity(dnj), M.maps[(i, j)].T)
        blocks.append(np.mod(eq, p))
    system = np.concatenate(blocks, axis=0) if blocks else la.zeros(0, total)
    ker = la.kernel_basis(system, p)
    out = []
    for c in range(ker.shape[1]):
        v = ker[:, c]
        mats = [v[offs[i]:offs[i] + M.dims[i] * N.dims[i]].reshape(N.dims[i], M.dims[i]) for i in range(n)]
        out.append(ModMorphism(M, N, mats, check=False))
    return out


def hom_dim(M: PersModule, N: PersModule) -> int:
    return len(hom_basis(M, N))


def hom_components(P: FinitePoset, S, T) -> list[frozenset]:
    """Components U of S ∩ T closed under predecessors in S and successors in T."""
    s = S.support if isinstance(S, Spread) else frozenset(S)
    t = T.support if isinstance(T, Spread) else frozenset(T)
    sm, tm = P.mask(s), P.mask(t)
    out = []
    for U in connected_components(P, s & t):
        um = P.mask(U)
        below_u = P.le[:, um].any(axis=1)
        above_u = P.le[um].any(axis=0)
        if np.all(um[sm & below_u]) and np.all(um[tm & above_u]):
            out.append(U)
    return out


def hom_dim_spreads(P: FinitePoset, S, T) -> tuple[int, list[frozenset]]:
    """dim Hom(I_S, I_T) with the image support of each basis morphism."""
    comps = hom_components(P, S, T)
    return len(comps), comps


def spread_hom_basis(P: FinitePoset, S, T, p: int | None = None,
                     source: PersModule | None = None, target: PersModule | None = None) -> list[ModMorphism]:
    """Basis of Hom(I_S, I_T): one indicator morphism per qualifying component."""
    source = source or spread_module(P, S, p)
    target = target or spread_module(P, T, p)
    out = []
    for U in hom_components(P, S, T):
        um = P.mask(U)
        mats = [la.identity(1) if um[i] else la.zeros(target.dims[i], source.dims[i]) for i in range(len(P))]
        out.append(ModMorphism(source, target, mats, check=False))
    return out


# ---------------------------------------------------------------------------
# presentations


@dataclass
class Presentation:
    """A projective presentation ⊕ P_rels → ⊕ P_gens → M → 0.

    ``matrix`` has one row per relation and one column per generator; the
    relation r maps to Σ_c matrix[r, c]·e_c.  ``cover`` is the epimorphism
    ⊕ P_gens → M.
    """

    gens: list
    rels: list
    matrix: np.ndarray
    cover: ModMorphism

    @property
    def points(self) -> list:
        return list(self.gens) + list(self.rels)


def top_vectors(M: PersModule, i: int) -> np.ndarray:
    """Columns completing the span of incoming structure maps at element ``i``."""
    p = M.p
    d = M.dims[i]
    if d == 0:
        return la.zeros(0, 0)
    incoming = [M.maps[(k, i)] for k in M.poset.down[i] if M.dims[k]]
    img = np.concatenate(incoming, axis=1) if incoming else la.zeros(d, 0)
    extra = la.extend_columns(la.image_basis(img, p) if img.shape[1] else img, la.identity(d), p)
    return la.identity(d)[:, extra]


def top_dims(M: PersModule) -> list[int]:
    return [top_vectors(M, i).shape[1] for i in range(len(M.poset))]


def projective_cover(M: PersModule) -> tuple[list, ModMorphism]:
    """Minimal projective cover: generator points and the epimorphism from their sum."""
    P, p = M.poset, M.p
    gens, vecs = [], []
    for i in range(len(P)):
        tv = top_vectors(M, i)
        for c in range(tv.shape[1]):
            gens.append(P.elements[i])
            vecs.append((i, tv[:, c]))
    P0 = projective_sum(P, gens, p)
    mats = []
    for x in range(len(P)):
        rows = P0.generator_rows[x]
        m = la.zeros(M.dims[x], len(rows))
        for c, k in enumerate(rows):
            gi, v = vecs[k]
            m[:, c] = la.matmul(M.transition(gi, x), v.reshape(-1, 1), p)[:, 0]
        mats.append(m)
    return gens, ModMorphism(P0, M, mats, check=False)


def minimal_presentation(M: PersModule) -> Presentation:
    P, p = M.poset, M.p
    gens, q = projective_cover(M)
    P0 = q.source
    K, incl = kernel(q)
    rels, rows = [], []
    for i in range(len(P)):
        tv = top_vectors(K, i)
        for c in range(tv.shape[1]):
            w = la.matmul(incl.mats[i], tv[:, c:c + 1], p)[:, 0]
            row = np.zeros(len(gens), dtype=np.int64)
            row[P0.generator_rows[i]] = w
            rels.append(P.elements[i])
            rows.append(row)
    matrix = np.array(rows, dtype=np.int64).reshape(len(rels), len(gens))
    return Presentation(gens, rels, matrix, q)


def module_from_presentation(P: FinitePoset, gens: Sequence[Point], rels: Sequence[Point], matrix,
                             p: int | None = None) -> PersModule:
    """Cokernel of the presentation map ⊕ P_rels → ⊕ P_gens."""
    pr = la.default_prime() if p is None else p
    mat = np.asarray(matrix, dtype=np.int64).reshape(len(rels), len(gens))
    d = projective_sum_morphism(P, list(rels), list(gens), mat.T, p=pr)
    C, _ = cokernel(d)
    return C


def random_presentation(P: FinitePoset, n_gens: int, n_rels: int, seed: int, p: int | None = None,
                        density: float = 0.8) -> tuple[list, list, np.ndarray]:
    pr = la.default_prime() if p is None else p
    rng = np.random.default_rng(seed)
    elems = P.elements
    gens = [elems[int(k)] for k in rng.integers(0, len(elems), size=n_gens)]
    rels = []
    for _ in range(n_rels):
        g = gens[int(rng.integers(0, n_gens))] if n_gens else elems[int(rng.integers(0, len(elems)))]
        above = sorted(P.upset([g]), key=P._idx)
        rels.append(above[int(rng.integers(0, len(above)))])
    gens = P.sort_points(gens)
    rels = P.sort_points(rels)
    mat = np.zeros((n_rels, n_gens), dtype=np.int64)
    for r, rp in enumerate(rels):
        for c, gp in enumerate(gens):
            if P.leq(gp, rp) and rng.random() < density:
                mat[r, c] = int(rng.integers(1, pr))
    return gens, rels, mat


def random_module(P: FinitePoset, n_gens: int, n_rels: int, seed: int, p: int | None = None,
                  density: float = 0.8) -> PersModule:
    """Cokernel of a random map between sums of projectives; deterministic in ``seed``."""
    gens, rels, mat = random_presentation(P, n_gens, n_rels, seed, p, density)
    return module_from_presentation(P, gens, rels, mat, p)


def dims_on(M: PersModule) -> dict:
    return {x: d for x, d in zip(M.poset.elements, M.dims)}


@dataclass
class SpreadPresentation:
    """Data of the canonical presentation of a finitely presented spread ⟨A,B⟨ on a grid."""

    A: list
    joins: list
    B: list
    relation_map: ModMorphism
    augmentation: ModMorphism
    upset_module: PersModule
    exit_inclusion: ModMorphism | None
    quotient: ModMorphism | None

    def verify(self) -> bool:
        d, e = self.relation_map, self.augmentation
        p = d.p
        for x in range(len(d.mats)):
            if np.any(la.matmul(e.mats[x], d.mats[x], p)):
                return False
            if la.rank(e.mats[x], p) != e.mats[x].shape[0]:
                return False
            nullity = e.mats[x].shape[1] - la.rank(e.mats[x], p)
            if la.rank(d.mats[x], p) != nullity:
                return False
        if self.exit_inclusion is not None:
            f, g = self.exit_inclusion, self.quotient
            for x in range(len(f.mats)):
                if not _exact_at(f.mats[x], g.mats[x], p):
                    return False
        return True


def _exact_at(f: np.ndarray, g: np.ndarray, p: int) -> bool:
    """0 → · --f--> · --g--> · → 0 is exact at this point."""
    if f.shape[1] and la.rank(f, p) != f.shape[1]:
        return False
    if g.shape[0] and la.rank(g, p) != g.shape[0]:
        return False
    if f.size and g.size and np.any(la.matmul(g, f, p)):
        return False
    return f.shape[1] + g.shape[0] == g.shape[1]


def spread_presentation(P: GridPoset, S: Spread, p: int | None = None) -> SpreadPresentation:
    """Presentation ⊕_{A′} P_z → ⊕_A P_x → I_⟨A,∞⟨ → 0 plus the sequence for the exits."""
    if not isinstance(P, GridPoset):
        raise PosetError("spread presentations need a grid (join-semilattice)")
    A = list(S.minima)
    pairs = [(a, b) for k, a in enumerate(A) for b in A[k + 1:]]
    joins = [P.join(a, b) for a, b in pairs]
    mat = np.zeros((len(A), len(joins)), dtype=np.int64)
    for c, (a, b) in enumerate(pairs):
        mat[A.index(a), c] = 1
        mat[A.index(b), c] = -1
    d = projective_sum_morphism(P, joins, A, mat, p=p)
    up = P.upset(A)
    upmod = indicator_module(P, up, p=d.p)
    P0 = d.target
    mats = []
    for x in range(len(P)):
        m = la.zeros(upmod.dims[x], P0.dims[x])
        if upmod.dims[x]:
            m[0, :] = 1
        mats.append(m)
    aug = ModMorphism(P0, upmod, mats, check=False)
    B = list(S.exits)
    inc = quo = None
    if B:
        bmod = indicator_module(P, P.upset(B), p=d.p)
        smod = indicator_module(P, S.support, p=d.p)
        inc = ModMorphism(bmod, upmod, [la.identity(1) if bmod.dims[x] else la.zeros(upmod.dims[x], 0)
                                        for x in range(len(P))], check=False)
        quo = ModMorphism(upmod, smod, [la.identity(1) if smod.dims[x] else la.zeros(0, upmod.dims[x])
                                        for x in range(len(P))], check=False)
    return SpreadPresentation(A, joins, B, d, aug, upmod, inc, quo)
