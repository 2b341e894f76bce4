import numpy as np
import pytest
from hypothesis import given, strategies as st

from spreadhom import linalg as la

P = 32003


@st.composite
def matrices(draw, max_dim=6, p=P):
    r = draw(st.integers(0, max_dim))
    c = draw(st.integers(0, max_dim))
    vals = draw(st.lists(st.integers(0, p - 1), min_size=r * c, max_size=r * c))
    return np.array(vals, dtype=np.int64).reshape(r, c)


@given(matrices())
def test_rank_nullity(m):
    k = la.kernel_basis(m, P)
    assert la.rank(m, P) + k.shape[1] == m.shape[1]
    assert not np.any(la.matmul(m, k, P))


@given(matrices())
def test_rref_is_reduced(m):
    R, piv = la.rref(m, P)
    assert len(piv) == la.rank(m, P)
    for row, c in enumerate(piv):
        assert R[row, c] == 1
        assert np.count_nonzero(R[:, c]) == 1


@given(matrices(), st.integers(0, 2**31 - 1))
def test_solve_consistent(m, seed):
    rng = np.random.default_rng(seed)
    x = la.random_matrix(rng, m.shape[1], 2, P)
    b = la.matmul(m, x, P)
    y = la.solve(m, b, P)
    assert y is not None
    assert np.array_equal(la.matmul(m, y, P), b)


def test_solve_inconsistent():
    m = np.array([[1, 0], [0, 0]])
    assert la.solve(m, np.array([[0], [1]]), P) is None


@given(st.integers(1, 6), st.integers(0, 2**31 - 1))
def test_inverse(n, seed):
    rng = np.random.default_rng(seed)
    a = la.random_matrix(rng, n, n, P)
    if la.rank(a, P) < n:
        with pytest.raises(ZeroDivisionError):
            la.inverse(a, P)
    else:
        assert np.array_equal(la.matmul(la.inverse(a, P), a, P), la.identity(n))


def test_small_prime_arithmetic():
    m = np.array([[1, 1], [1, 1]])
    assert la.rank(m, 2) == 1
    assert la.rank(np.array([[2, 1], [1, 2]]), 3) == 1
    assert la.rank(np.array([[2, 1], [1, 2]]), 5) == 2


def test_extend_columns():
    base = np.array([[1], [0], [0]])
    cand = np.array([[2, 0, 1], [0, 0, 1], [0, 0, 0]])
    assert la.extend_columns(base, cand, P) == [2]


def test_empty_conventions():
    z = la.zeros(0, 3)
    assert la.rank(z, P) == 0
    assert la.kernel_basis(z, P).shape == (3, 3)


@pytest.mark.parametrize("p", [1, 4, 2**31 + 11, -7])
def test_bad_primes(p):
    with pytest.raises(la.FieldError):
        la.validate_prime(p)


def test_env_prime(monkeypatch):
    monkeypatch.setenv("SPREADHOM_PRIME", "101")
    assert la.default_prime() == 101
    monkeypatch.setenv("SPREADHOM_PRIME", "100")
    with pytest.raises(la.FieldError):
        la.default_prime()
