from collections import Counter

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spreadhom.functors import (
    PresentedModule,
    SupportOutsideQPlus,
    check_extended_class,
    contract,
    contract_morphism,
    counit,
    extend,
    extend_morphism,
    extension_support,
    lgrid,
    random_presented,
    restrict,
    thin_summands,
    unit,
    upset_precover_probe,
)
from spreadhom.poset import GridPoset, NotAligned, aligned_subgrid, connected_components, grid
from spreadhom.rep import (
    cokernel,
    hom_basis,
    indicator_module,
    kernel,
    linear_combination,
    projective,
    random_module,
    simple,
    zero_module,
)
from spreadhom.rha import ShortExactSeq, is_fx_exact, minimal_resolution, rank_invariant
from spreadhom.spreadcalc import make_family

B3 = grid(3, 3)
QC = GridPoset([[0, 2], [0, 2]])
EX_M = indicator_module(B3, [(0, 1), (0, 2), (1, 0), (1, 1), (1, 2), (2, 0)])
B4 = grid(4, 4)
Q4 = GridPoset([[1, 3], [0, 2]])
QPLUS4 = GridPoset([[1, 2, 3], [0, 1, 2, 3]])


def isomorphic(M, N, seed=0):
    if M.dims != N.dims:
        return False
    basis = hom_basis(M, N)
    if not basis:
        return M.is_zero()
    rng = np.random.default_rng(seed)
    f = linear_combination(basis, [int(c) for c in rng.integers(1, M.p, len(basis))], M, N)
    return f.is_iso()


def test_lgrid_examples():
    assert lgrid(projective(B3, (1, 2))).elements == ((1, 2),)
    up = indicator_module(B3, B3.upset([(0, 1), (1, 0)]))
    assert lgrid(up) == GridPoset([[0, 1], [0, 1]])
    assert lgrid(zero_module(B3)) is None
    pm = PresentedModule([(0, 1), (1, 0)], [(1, 1)], [[1, -1]])
    assert lgrid(pm) == GridPoset([[0, 1], [0, 1]])


def test_presented_module_checks():
    with pytest.raises(Exception):
        PresentedModule([(1, 1)], [(0, 0)], [[1]])
    pm = PresentedModule([(0, 0), (0, 0)], [(1, 1)], [[1, 0]])
    assert pm.minimized().gens == [(0, 0), (0, 0)]
    assert len(pm.minimized().rels) == 1


def test_contraction_example():
    C = contract(EX_M, QC)
    assert dict(zip(QC.elements, C.dims)) == {(0, 0): 1, (0, 2): 1, (2, 0): 0, (2, 2): 0}
    assert C.structure_map((0, 0), (0, 2)).tolist() == [[1]]
    R = restrict(EX_M, QC)
    assert thin_summands(R) == [frozenset({(0, 2)}), frozenset({(2, 0)})]
    eta = unit(EX_M, QC)
    assert not eta.is_injective()
    assert eta.component((2, 0)).shape == (0, 1)


def test_contract_rejects_outside_support():
    with pytest.raises(SupportOutsideQPlus):
        contract(simple(B4, (0, 0)), Q4)


def test_extend_projective_and_zero():
    for y in Q4:
        assert extend(projective(Q4, y), B4) == projective(B4, y)
    assert extend(zero_module(Q4), B4).is_zero()


def test_contract_projective():
    for x in B4:
        if Q4.in_upper_set(x):
            assert isomorphic(contract(projective(B4, x), Q4), projective(Q4, Q4.floor(x)))


def test_restrict_full_grid_is_identity():
    M = random_module(B3, 3, 2, 1)
    assert restrict(M, B3) == M


@given(st.integers(0, 10**6))
def test_round_trips(seed):
    N = random_module(Q4, 3, 2, seed)
    E = extend(N, B4)
    assert restrict(E, Q4) == N
    assert isomorphic(contract(E, Q4), N, seed)


@given(st.integers(0, 10**6))
def test_counit_iso_on_presented_modules(seed):
    M = random_presented(Q4, 3, 2, seed).realize(B4)
    eps = counit(M, Q4)
    assert eps.is_iso()
    assert isomorphic(contract(M, Q4), restrict(M, Q4), seed)


def test_unit_counit_projectives():
    for y in Q4:
        P = projective(B4, y)
        assert unit(P, Q4).is_iso() and counit(P, Q4).is_iso()


@given(st.integers(0, 10**6))
def test_contraction_exact(seed):
    M = random_presented(QPLUS4, 3, 2, seed).realize(B4)
    N = random_presented(QPLUS4, 3, 1, seed + 7).realize(B4)
    H = hom_basis(M, N)
    if not H:
        return
    rng = np.random.default_rng(seed)
    f = linear_combination(H, [int(c) for c in rng.integers(0, M.p, len(H))], M, N)
    cf = contract_morphism(f, Q4)
    K, _ = kernel(f)
    C, _ = cokernel(f)
    assert contract(K, Q4).dims == kernel(cf)[0].dims
    assert contract(C, Q4).dims == cokernel(cf)[0].dims


@given(st.integers(0, 10**6))
def test_contraction_bound_independent(seed):
    pm = random_presented(QPLUS4, 3, 2, seed)
    small, big = pm.realize(B4), pm.realize(GridPoset([range(6), range(-1, 5)]))
    assert isomorphic(contract(small, Q4), contract(big, Q4), seed)


def test_extension_exact():
    for seed in range(10):
        N = random_module(Q4, 3, 2, seed)
        f = hom_basis(projective(Q4, (1, 0)), N)
        if not f:
            continue
        C, g = cokernel(f[0])
        K, i = kernel(f[0])
        ef = extend_morphism(f[0], B4)
        assert extend(C, B4).dims == cokernel(ef)[0].dims
        assert extend(K, B4).dims == kernel(ef)[0].dims


def test_hook_resolutions_lift():
    hooks_q, hooks_b = make_family(Q4, "hooks"), make_family(B4, "hooks")
    for seed in range(8):
        M = random_presented(Q4, 3, 2, seed).realize(B4)
        rq = minimal_resolution(contract(M, Q4), hooks_q)
        rb = minimal_resolution(M, hooks_b)
        lifted = [Counter(c for a in t
                          for c in connected_components(B4, extension_support(Q4, hooks_q.members[a].support, B4)))
                  for t in rq.terms]
        direct = [Counter(hooks_b.members[a].support for a in t) for t in rb.terms]
        assert lifted == direct


def test_non_aligned_rejected():
    with pytest.raises(NotAligned):
        aligned_subgrid([(1, 1), (2, 2), (3, 2), (2, 3), (3, 3)])


def test_extended_class_upsets_counterexample():
    bound = GridPoset([[1, 2], [1, 2]])
    Q = GridPoset([[2], [1, 2]])
    rep = check_extended_class(bound, [bound, Q], "fp_upsets")
    assert not rep.passed
    v = rep.first_violation
    assert v["condition"] == 5
    assert v["witness"]["member"] == {"A": [[1, 2], [2, 1]], "B": "inf"}
    assert v["witness"]["simple_at"] == [2, 1]


@pytest.mark.parametrize("kind", ["hooks", "single_source_spreads"])
def test_extended_class_positive(kind):
    grids = [B4, GridPoset([[1, 3], [0, 2, 3]]), Q4, GridPoset([[0], [0, 3]])]
    mods = [random_presented(Q4, 2, 1, s).realize(B4) for s in range(3)]
    assert check_extended_class(B4, grids, kind, mods).passed


def test_condition_six_reports_uncovered_module():
    M = projective(B4, (2, 1))
    rep = check_extended_class(B4, [Q4, B4], "hooks", [M])
    assert rep.passed
    rep = check_extended_class(B4, [Q4], "hooks", [M])
    assert not rep.passed


def test_extended_cover_not_fx_exact():
    bound = GridPoset([[1, 2], [1, 2]])
    Q = GridPoset([[2], [1, 2]])
    P = projective(Q, (2, 1))
    S = simple(Q, (2, 1))
    q = hom_basis(P, S)[0]
    K, i = kernel(q)
    fam_q, fam = make_family(Q, "fp_upsets"), make_family(bound, "fp_upsets")
    assert is_fx_exact(ShortExactSeq(i, q), fam_q)
    ext = ShortExactSeq(extend_morphism(i, bound), extend_morphism(q, bound))
    assert not is_fx_exact(ext, fam)


def test_precover_probe():
    r = upset_precover_probe(B4, 0, 2, 1)
    assert r.chain == [[[0, 1]], [[0, 1], [3, 0]], [[0, 1], [2, 0]]]
    assert r.maximal_touches_bound and not r.genuine_precover
    wide = upset_precover_probe(GridPoset.from_sizes([4, 5]), 0, 2, 2)
    assert len(wide.chain) > len(r.chain)
    with pytest.raises(ValueError):
        upset_precover_probe(B4, 1, 1, 1)
    closed = upset_precover_probe(B4, 0, 2, 1, ambient_has_minimum=True)
    assert closed.genuine_precover and closed.bound_cover == [{"A": [[0, 1], [2, 0]], "B": "inf"}]
