"""Finite posets, grids, antichains and spreads.

A grid is a product of finite chains.  Each axis of a :class:`GridPoset` is a
sorted tuple of integers, so the same class models the full grid
``{0..n1-1} x ... x {0..nk-1}`` and any aligned subgrid embedded in a larger
integer lattice.  Points of a grid are integer tuples.
"""

from __future__ import annotations

import itertools
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

import numpy as np

Point = Hashable


class PosetError(ValueError):
    pass


class NotASpread(ValueError):
    pass


class NotInUpperSet(ValueError):
    pass


class NotAligned(ValueError):
    pass


class FinitePoset:
    """A finite poset given by elements and a generating set of relations.

    The order is the reflexive-transitive closure of ``relations``; a cycle
    raises :class:`PosetError`.
    """

    def __init__(self, elements: Sequence[Point], relations: Iterable[tuple[Point, Point]] = ()):
        self.elements: tuple = tuple(elements)
        self.index: dict = {x: i for i, x in enumerate(self.elements)}
        if len(self.index) != len(self.elements):
            raise PosetError("duplicate elements")
        n = len(self.elements)
        le = np.eye(n, dtype=bool)
        for x, y in relations:
            le[self._idx(x), self._idx(y)] = True
        for k in range(n):
            le |= le[:, k:k + 1] & le[k:k + 1, :]
        self._finish(le)

    def _finish(self, le: np.ndarray) -> None:
        n = le.shape[0]
        if np.any(le & le.T & ~np.eye(n, dtype=bool)):
            raise PosetError("relation is not antisymmetric")
        self.le = le
        self.le.setflags(write=False)
        lt = (le & ~np.eye(n, dtype=bool)).astype(np.int64)
        cov = (lt > 0) & ((lt @ lt) == 0)
        self.hasse_idx: tuple = tuple(zip(*np.nonzero(cov)))
        self.hasse_idx = tuple((int(i), int(j)) for i, j in self.hasse_idx)
        self.up: tuple = tuple(tuple(int(j) for j in np.flatnonzero(cov[i])) for i in range(n))
        self.down: tuple = tuple(tuple(int(i) for i in np.flatnonzero(cov[:, j])) for j in range(n))
        # a linear extension, used wherever an evaluation order is needed
        self.topo: tuple = tuple(sorted(range(n), key=lambda i: (int(le[:, i].sum()), i)))

    def _idx(self, x: Point) -> int:
        try:
            return self.index[x]
        except (KeyError, TypeError):
            raise PosetError(f"unknown point {x!r}") from None

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x) -> bool:
        try:
            return x in self.index
        except TypeError:
            return False

    def __eq__(self, other) -> bool:
        if not isinstance(other, FinitePoset):
            return NotImplemented
        return self.elements == other.elements and bool(np.array_equal(self.le, other.le))

    def __hash__(self) -> int:
        return hash(self.elements)

    @property
    def hasse(self) -> list[tuple[Point, Point]]:
        return [(self.elements[i], self.elements[j]) for i, j in self.hasse_idx]

    def leq(self, x: Point, y: Point) -> bool:
        return bool(self.le[self._idx(x), self._idx(y)])

    def lt(self, x: Point, y: Point) -> bool:
        return x != y and self.leq(x, y)

    def is_cover(self, x: Point, y: Point) -> bool:
        """Classical cover relation x ⋖ y."""
        return self._idx(y) in self.up[self._idx(x)]

    def minimal(self, s: Iterable[Point]) -> list[Point]:
        idx = sorted(self._idx(x) for x in s)
        return [self.elements[i] for i in idx
                if not any(j != i and self.le[j, i] for j in idx)]

    def maximal(self, s: Iterable[Point]) -> list[Point]:
        idx = sorted(self._idx(x) for x in s)
        return [self.elements[i] for i in idx
                if not any(j != i and self.le[i, j] for j in idx)]

    def upset(self, a: Iterable[Point]) -> frozenset:
        """The upset generated by ``a``, i.e. ⟨A,∞⟨."""
        idx = [self._idx(x) for x in a]
        if not idx:
            return frozenset()
        mask = self.le[idx].any(axis=0)
        return frozenset(self.elements[i] for i in np.flatnonzero(mask))

    def downset(self, b: Iterable[Point]) -> frozenset:
        idx = [self._idx(x) for x in b]
        if not idx:
            return frozenset()
        mask = self.le[:, idx].any(axis=1)
        return frozenset(self.elements[i] for i in np.flatnonzero(mask))

    def mask(self, s: Iterable[Point]) -> np.ndarray:
        m = np.zeros(len(self), dtype=bool)
        for x in s:
            m[self._idx(x)] = True
        return m

    def sort_points(self, s: Iterable[Point]) -> list[Point]:
        return sorted(s, key=self._idx)

    def has_unique_maximum(self) -> bool:
        return len(self.maximal(self.elements)) == 1

    def has_unique_minimum(self) -> bool:
        return len(self.minimal(self.elements)) == 1

    def is_chain(self) -> bool:
        return bool(np.all(self.le | self.le.T))

    def describe(self) -> dict:
        return {
            "kind": "finite",
            "elements": list(self.elements),
            "leq": [[int(i), int(j)] for i, j in self.hasse_idx],
        }


class GridPoset(FinitePoset):
    """Product of finite chains with the componentwise order.

    ``axes`` holds the coordinate values of each chain.  ``GridPoset.from_sizes``
    builds the standard grid with coordinates ``0..n-1`` on each axis.
    """

    def __init__(self, axes: Sequence[Iterable[int]]):
        ax = tuple(tuple(sorted(set(int(v) for v in a))) for a in axes)
        if not ax or any(len(a) == 0 for a in ax):
            raise PosetError("grid axes must be nonempty")
        self.axes: tuple = ax
        self.elements = tuple(itertools.product(*ax))
        self.index = {x: i for i, x in enumerate(self.elements)}
        pts = np.array(self.elements, dtype=np.int64).reshape(len(self.elements), len(ax))
        le = np.all(pts[:, None, :] <= pts[None, :, :], axis=2)
        self._finish(le)

    @classmethod
    def from_sizes(cls, sizes: Sequence[int]) -> "GridPoset":
        if any(int(s) < 1 for s in sizes):
            raise PosetError("axis sizes must be positive")
        return cls([range(int(s)) for s in sizes])

    @property
    def sizes(self) -> tuple:
        return tuple(len(a) for a in self.axes)

    @property
    def dim(self) -> int:
        return len(self.axes)

    def is_standard(self) -> bool:
        return all(a == tuple(range(len(a))) for a in self.axes)

    def leq(self, x, y) -> bool:
        self._idx(x)
        self._idx(y)
        return all(a <= b for a, b in zip(x, y))

    def join(self, x, y) -> tuple:
        return tuple(max(a, b) for a, b in zip(x, y))

    def meet(self, x, y) -> tuple:
        return tuple(min(a, b) for a, b in zip(x, y))

    @property
    def bottom(self) -> tuple:
        return tuple(a[0] for a in self.axes)

    @property
    def top(self) -> tuple:
        return tuple(a[-1] for a in self.axes)

    def contains_grid(self, other: "GridPoset") -> bool:
        return other.dim == self.dim and all(set(b) <= set(a) for a, b in zip(self.axes, other.axes))

    def in_upper_set(self, x: Sequence[int]) -> bool:
        """Whether ``x`` lies in Q⁺, the set of points above some point of the grid."""
        return all(v >= a[0] for v, a in zip(x, self.axes))

    def floor(self, x: Sequence[int]) -> tuple:
        """The largest grid point below ``x`` (componentwise predecessor)."""
        if len(x) != self.dim:
            raise PosetError(f"point {tuple(x)} has wrong dimension")
        out = []
        for v, a in zip(x, self.axes):
            k = bisect_right(a, v)
            if k == 0:
                raise NotInUpperSet(f"{tuple(x)} is not above any point of the grid")
            out.append(a[k - 1])
        return tuple(out)

    def next_coord(self, axis: int, v: int) -> int | None:
        a = self.axes[axis]
        k = bisect_right(a, v)
        return a[k] if k < len(a) else None

    def describe(self) -> dict:
        if self.is_standard():
            return {"kind": "grid", "sizes": list(self.sizes)}
        return {"kind": "grid", "axes": [list(a) for a in self.axes]}

    def __repr__(self) -> str:
        if self.is_standard():
            return f"GridPoset.from_sizes({list(self.sizes)})"
        return f"GridPoset({[list(a) for a in self.axes]})"


AlignedSubgrid = GridPoset


def grid(*sizes: int) -> GridPoset:
    return GridPoset.from_sizes(sizes)


def grid_closure(points: Iterable[Sequence[int]]) -> GridPoset:
    """Smallest aligned grid containing ``points``: the product of their projections."""
    pts = [tuple(p) for p in points]
    if not pts:
        raise PosetError("grid closure of an empty set")
    n = len(pts[0])
    return GridPoset([{p[i] for p in pts} for i in range(n)])


def aligned_subgrid(points: Iterable[Sequence[int]]) -> GridPoset:
    """The aligned subgrid with exactly these points; rejects anything else."""
    pts = {tuple(p) for p in points}
    g = grid_closure(pts)
    if set(g.elements) != pts:
        raise NotAligned("point set is not a product of per-axis subsets")
    return g


def floor_in(points: Iterable[Sequence[int]], x: Sequence[int]) -> tuple:
    """max{y in points | y <= x} for an arbitrary point set; errors when it does not exist."""
    below = [tuple(y) for y in points if all(a <= b for a, b in zip(y, x))]
    if not below:
        raise NotInUpperSet(f"{tuple(x)} is not above any given point")
    best = [y for y in below if all(all(a <= b for a, b in zip(z, y)) for z in below)]
    if not best:
        raise NotInUpperSet(f"no largest point below {tuple(x)}")
    return best[0]


def ceil_class(q, y: Sequence[int], bound: GridPoset) -> frozenset:
    """{x in bound | x above q and floor(x) = y}.

    ``q`` may be a :class:`GridPoset` (aligned case, computed as a box) or any
    point set (computed pointwise, points with no floor are skipped).
    """
    y = tuple(y)
    if isinstance(q, GridPoset):
        if y not in q:
            raise PosetError(f"{y} is not a point of the subgrid")
        ranges = []
        for i, a in enumerate(bound.axes):
            nxt = q.next_coord(i, y[i])
            ranges.append([v for v in a if v >= y[i] and (nxt is None or v < nxt)])
        return frozenset(itertools.product(*ranges))
    pts = [tuple(p) for p in q]
    if y not in pts:
        raise PosetError(f"{y} is not a point of the subgrid")
    out = set()
    for x in bound.elements:
        try:
            if floor_in(pts, x) == y:
                out.add(x)
        except NotInUpperSet:
            pass
    return frozenset(out)


def is_sublattice(points: Iterable[Sequence[int]]) -> bool:
    pts = {tuple(p) for p in points}
    for a in pts:
        for b in pts:
            if tuple(map(max, a, b)) not in pts or tuple(map(min, a, b)) not in pts:
                return False
    return True


# ---------------------------------------------------------------------------
# antichains and point-set predicates


def is_antichain(P: FinitePoset, a: Iterable[Point]) -> bool:
    idx = [P._idx(x) for x in a]
    return not any(i != j and P.le[i, j] for i in idx for j in idx)


def antichain_leq(P: FinitePoset, a: Iterable[Point], b: Iterable[Point]) -> bool:
    """A ≤ B: some element of A lies below some element of B."""
    ia = [P._idx(x) for x in a]
    ib = [P._idx(x) for x in b]
    if not ia or not ib:
        return False
    return bool(P.le[np.ix_(ia, ib)].any())


def antichains(P: FinitePoset) -> list[tuple]:
    """All nonempty antichains, each as a tuple sorted by element index."""
    n = len(P)
    comp = P.le | P.le.T
    out: list[tuple] = []

    def grow(current: list[int], allowed: np.ndarray, start: int) -> None:
        for i in range(start, n):
            if allowed[i]:
                nxt = current + [i]
                out.append(tuple(P.elements[k] for k in nxt))
                grow(nxt, allowed & ~comp[i], i + 1)

    grow([], np.ones(n, dtype=bool), 0)
    return out


def below_cover(P: FinitePoset, s: Iterable[Point], x: Point) -> bool:
    """x ⋖ S: x lies below S, outside it, and everything strictly between x and S is in S."""
    sm = P.mask(s)
    i = P._idx(x)
    if sm[i] or not sm.any():
        return False
    below_s = P.le[:, sm].any(axis=1)
    if not below_s[i]:
        return False
    between = P.le[i] & below_s
    between[i] = False
    return bool(np.all(sm[between]))


def above_cover(P: FinitePoset, s: Iterable[Point], x: Point) -> bool:
    """S ⋖ x: x lies above S, outside it, and everything strictly between S and x is in S."""
    sm = P.mask(s)
    i = P._idx(x)
    if sm[i] or not sm.any():
        return False
    above_s = P.le[sm].any(axis=0)
    if not above_s[i]:
        return False
    between = P.le[:, i] & above_s
    between[i] = False
    return bool(np.all(sm[between]))


covers_set = below_cover


def is_convex(P: FinitePoset, s: Iterable[Point]) -> bool:
    sm = P.mask(s)
    if not sm.any():
        return True
    hull = P.le[sm].any(axis=0) & P.le[:, sm].any(axis=1)
    return bool(np.array_equal(hull, sm))


def connected_components(P: FinitePoset, s: Iterable[Point]) -> list[frozenset]:
    """Components of the comparability graph on ``s``, ordered by least element index."""
    idx = sorted({P._idx(x) for x in s})
    remaining = set(idx)
    comps = []
    for start in idx:
        if start not in remaining:
            continue
        remaining.discard(start)
        stack, comp = [start], [start]
        while stack:
            i = stack.pop()
            nbrs = [j for j in remaining if P.le[i, j] or P.le[j, i]]
            for j in nbrs:
                remaining.discard(j)
                stack.append(j)
                comp.append(j)
        comps.append(frozenset(P.elements[k] for k in comp))
    return comps


def is_connected(P: FinitePoset, s: Iterable[Point]) -> bool:
    s = list(s)
    return len(s) > 0 and len(connected_components(P, s)) == 1


def interval_open(P: FinitePoset, a: Iterable[Point], b: Iterable[Point] | None) -> frozenset:
    """⟨A,B⟨ = {c | A ≤ c, c not above B}; ``b=None`` means ⟨A,∞⟨."""
    up = P.upset(a)
    if b is None:
        return up
    return up - P.upset(b)


def interval_closed(P: FinitePoset, a: Iterable[Point], b: Iterable[Point]) -> frozenset:
    """⟨A,B⟩ = {c | A ≤ c ≤ B}."""
    return P.upset(a) & P.downset(b)


def cohook(P: FinitePoset, a: Iterable[Point], b: Iterable[Point]) -> frozenset:
    """⟩A,B⟩ = {c | c not below A, c ≤ B}."""
    return P.downset(b) - P.downset(a)


@dataclass(frozen=True, eq=False)
class Spread:
    """A convex connected subset of a poset.

    ``minima`` and ``maxima`` are sorted by element index, and ``exits`` is the
    antichain B with support = ⟨minima, B⟨ (empty tuple for an upset).
    """

    support: frozenset
    minima: tuple
    maxima: tuple
    exits: tuple
    key: tuple = field(repr=False)

    def __eq__(self, other) -> bool:
        return isinstance(other, Spread) and self.support == other.support

    def __hash__(self) -> int:
        return hash(self.support)

    def __len__(self) -> int:
        return len(self.support)

    def __contains__(self, x) -> bool:
        return x in self.support

    @property
    def is_upset_form(self) -> bool:
        return not self.exits

    def describe(self) -> dict:
        return {
            "A": [_jsonable(x) for x in self.minima],
            "B": "inf" if not self.exits else [_jsonable(x) for x in self.exits],
        }


def _jsonable(x):
    return list(x) if isinstance(x, tuple) else x


def make_spread(P: FinitePoset, support: Iterable[Point], check: bool = True) -> Spread:
    sup = frozenset(support)
    if not sup:
        raise NotASpread("empty set")
    for x in sup:
        P._idx(x)
    if check:
        if not is_convex(P, sup):
            raise NotASpread("set is not convex")
        if not is_connected(P, sup):
            raise NotASpread("set is not connected")
    mins = tuple(P.minimal(sup))
    maxs = tuple(P.maximal(sup))
    exits = tuple(P.minimal(P.upset(mins) - sup))
    key = (tuple(P.index[x] for x in mins), tuple(P.index[x] for x in maxs))
    return Spread(sup, mins, maxs, exits, key)


def materialize_spread(P: FinitePoset, a: Iterable[Point], b: Iterable[Point] | None = None) -> Spread:
    """The spread ⟨A,B⟨ (or ⟨A,∞⟨ when ``b`` is None)."""
    a = list(a)
    if not a:
        raise NotASpread("A must be nonempty")
    if b is not None:
        b = list(b)
    sup = interval_open(P, a, b)
    if not sup:
        raise NotASpread("empty interval")
    if not is_connected(P, sup):
        raise NotASpread("interval is not connected")
    return make_spread(P, sup)


def segment(P: FinitePoset, a: Point, b: Point) -> Spread:
    if not P.leq(a, b):
        raise NotASpread("segment needs a <= b")
    return make_spread(P, interval_closed(P, [a], [b]), check=False)


def hook(P: FinitePoset, a: Point, b: Point | None) -> Spread:
    """⟨a,b⟨, with ``b=None`` meaning ⟨a,∞⟨."""
    return materialize_spread(P, [a], None if b is None else [b])


def upset_spread(P: FinitePoset, a: Iterable[Point]) -> Spread:
    return materialize_spread(P, a, None)
