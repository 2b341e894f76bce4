import itertools

import pytest
from hypothesis import given, strategies as st

from spreadhom.poset import (
    FinitePoset,
    GridPoset,
    NotAligned,
    NotASpread,
    NotInUpperSet,
    PosetError,
    above_cover,
    aligned_subgrid,
    antichain_leq,
    antichains,
    below_cover,
    ceil_class,
    cohook,
    connected_components,
    grid,
    grid_closure,
    hook,
    is_antichain,
    is_connected,
    is_convex,
    is_sublattice,
    make_spread,
    materialize_spread,
    segment,
)
from spreadhom.spreadcalc import all_spreads

G3 = grid(3, 3)
HOOK = hook(G3, (0, 0), (1, 1)).support


def brute_spread_count(sizes):
    """Count convex connected subsets by direct enumeration of all subsets."""
    pts = list(itertools.product(*[range(n) for n in sizes]))
    le = lambda a, b: all(u <= v for u, v in zip(a, b))
    count = 0
    for bits in range(1, 1 << len(pts)):
        s = [p for k, p in enumerate(pts) if bits >> k & 1]
        ss = set(s)
        convex = all(z in ss for z in pts for x in s for y in s if le(x, z) and le(z, y))
        if not convex:
            continue
        seen, stack = {s[0]}, [s[0]]
        while stack:
            x = stack.pop()
            for y in s:
                if y not in seen and (le(x, y) or le(y, x)):
                    seen.add(y)
                    stack.append(y)
        count += len(seen) == len(s)
    return count


def test_leq_examples():
    assert G3.leq((0, 0), (1, 2))
    assert not G3.leq((1, 0), (0, 1))
    assert G3.leq((2, 1), (2, 1))
    with pytest.raises(PosetError):
        G3.leq((0, 0), (5, 5))


def test_hasse_is_transitive_reduction():
    P = FinitePoset("abcd", [("a", "b"), ("b", "c"), ("a", "c"), ("a", "d")])
    assert sorted(P.hasse) == [("a", "b"), ("a", "d"), ("b", "c")]
    assert P.leq("a", "c") and not P.leq("d", "c")
    with pytest.raises(PosetError):
        FinitePoset("ab", [("a", "b"), ("b", "a")])


def test_covers_example():
    # the hook <a,b< of the 3x3 grid with b = (1,1), c = (2,1)
    assert above_cover(G3, HOOK, (1, 1))
    assert not above_cover(G3, HOOK, (2, 1))
    assert any(G3.is_cover(y, (2, 1)) for y in HOOK)
    assert below_cover(G3, {(1, 1)}, (0, 1))
    assert not below_cover(G3, {(2, 2)}, (0, 1))


def test_antichain_leq():
    assert antichain_leq(G3, [(0, 2), (1, 1), (2, 0)], [(2, 2)])
    assert not antichain_leq(G3, [(2, 2)], [(0, 0)])
    A = [(0, 1), (1, 0)]
    assert antichain_leq(G3, A, A)


def test_materialize_examples():
    up = materialize_spread(G3, [(0, 2), (1, 1), (2, 0)])
    assert up.support == frozenset(x for x in G3 if sum(x) >= 2)
    assert up.support == cohook(G3, [(0, 1), (1, 0)], [(2, 2)])
    assert HOOK == frozenset([(0, 0), (0, 1), (0, 2), (1, 0), (2, 0)])
    assert materialize_spread(G3, [(2, 2)]).support == {(2, 2)}
    assert segment(G3, (1, 0), (2, 2)).support == G3.upset([(1, 0)])


def test_convex_not_connected():
    s = HOOK - {(0, 0)}
    assert is_convex(G3, s) and not is_connected(G3, s)
    assert len(connected_components(G3, s)) == 2
    with pytest.raises(NotASpread):
        make_spread(G3, s)
    assert is_convex(G3, G3.elements) and is_connected(G3, G3.elements)
    assert len(connected_components(G3, [(0, 2), (2, 0)])) == 2


def test_disconnected_interval_rejected():
    with pytest.raises(NotASpread):
        materialize_spread(G3, [(0, 2), (2, 0)], [(1, 2), (2, 1)])


def test_floor_examples():
    Q = GridPoset([[0, 2], [0, 2]])
    assert Q.floor((1, 1)) == (0, 0)
    assert Q.floor((1, 2)) == (0, 2)
    for y in Q:
        assert Q.floor(y) == y
    with pytest.raises(NotInUpperSet):
        GridPoset([[1, 2], [1, 2]]).floor((0, 2))


def test_ceil_class_examples():
    Q = GridPoset([[0, 2], [0, 2]])
    assert ceil_class(Q, (0, 0), G3) == {(0, 0), (0, 1), (1, 0), (1, 1)}
    assert ceil_class(Q, (2, 2), G3) == {(2, 2)}
    B = GridPoset([[1, 2, 3], [1, 2, 3]])
    q = [(1, 1), (2, 2), (3, 2), (2, 3), (3, 3)]
    assert is_sublattice(q)
    cls = ceil_class(q, (1, 1), B)
    assert cls == {x for x in B if x[0] == 1 or x[1] == 1}
    assert not is_sublattice(cls)
    with pytest.raises(NotAligned):
        aligned_subgrid(q)


def test_grid_closure():
    g = grid_closure([(0, 1), (2, 0)])
    assert g.axes == ((0, 2), (0, 1))
    assert len(grid_closure([(3, 4)])) == 1
    Q = GridPoset([[0, 3], [1, 2, 4]])
    assert grid_closure(Q.elements) == Q


@pytest.mark.parametrize("sizes,count", [((2, 2), 11), ((3, 3), 83), ((3, 4), 212)])
def test_spread_counts(sizes, count):
    assert len(all_spreads(grid(*sizes))) == count
    assert brute_spread_count(sizes) == count


def test_spread_count_4x4():
    assert len(all_spreads(grid(4, 4))) == 678


def test_antichains_are_antichains():
    acs = antichains(G3)
    assert len(acs) == 19
    assert all(is_antichain(G3, a) for a in acs)


def test_spread_descriptor_roundtrip():
    for s in all_spreads(G3):
        B = list(s.exits) or None
        assert materialize_spread(G3, s.minima, B).support == s.support
        assert set(s.minima) == set(G3.minimal(s.support))


@st.composite
def aligned_setup(draw):
    dims = draw(st.sampled_from([(4, 4), (4, 4, 3), (3, 4), (2, 3, 3)]))
    bound = grid(*dims)
    axes = [sorted(draw(st.sets(st.integers(0, n - 1), min_size=1, max_size=n))) for n in dims]
    Q = GridPoset(axes)
    plus = [x for x in bound if Q.in_upper_set(x)]
    x = draw(st.sampled_from(plus))
    z = draw(st.sampled_from(plus))
    y2 = draw(st.sampled_from([q for q in Q if Q.leq(Q.floor(x), q)]))
    return bound, Q, x, z, y2


@given(aligned_setup())
def test_floor_lemmas(setup):
    bound, Q, x, z, y2 = setup
    fx, fz = Q.floor(x), Q.floor(z)
    assert bound.leq(fx, x)
    assert all(not bound.leq(q, x) or Q.leq(q, fx) for q in Q)
    assert Q.floor(bound.join(x, z)) == Q.join(fx, fz)
    assert Q.floor(bound.meet(x, z)) == Q.meet(fx, fz)
    if bound.leq(x, z):
        assert Q.leq(fx, fz)
    j = bound.join(y2, x)
    assert j in ceil_class(Q, y2, bound)
    assert is_sublattice(ceil_class(Q, fx, bound))


@given(st.sampled_from(all_spreads(grid(3, 3))))
def test_components_partition(s):
    extra = frozenset([(0, 2), (2, 0)])
    pts = s.support | extra
    comps = connected_components(G3, pts)
    assert frozenset().union(*comps) == pts
    assert sum(len(c) for c in comps) == len(pts)
    assert all(is_connected(G3, c) for c in comps)


def test_upset_minima_roundtrip():
    for A in antichains(G3):
        s = materialize_spread(G3, A)
        assert is_convex(G3, s.support)
        assert set(s.minima) == set(A)
