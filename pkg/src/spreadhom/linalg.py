"""Exact linear algebra over a prime field F_p.

Matrices are numpy int64 arrays with entries kept in ``[0, p)``.  The prime
must stay below 2**31 so that products of two reduced entries summed over a
few thousand terms never overflow int64.
"""

from __future__ import annotations

import os

import numpy as np

DEFAULT_PRIME = 32003
_MAX_PRIME = 2**31 - 1


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def validate_prime(p: int) -> int:
    p = int(p)
    if not is_prime(p) or p > _MAX_PRIME:
        raise FieldError(f"field characteristic must be a prime below 2^31, got {p}")
    return p


def default_prime() -> int:
    """Prime from ``SPREADHOM_PRIME`` if set, else 32003."""
    env = os.environ.get("SPREADHOM_PRIME")
    if env:
        try:
            return validate_prime(int(env))
        except ValueError as exc:
            raise FieldError(f"bad SPREADHOM_PRIME={env!r}") from exc
    return DEFAULT_PRIME


def as_field(a, p: int) -> np.ndarray:
    arr = np.asarray(a, dtype=np.int64)
    return np.mod(arr, p)


def zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=np.int64)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    if a.shape[1] == 0 or b.shape[0] == 0:
        return zeros(a.shape[0], b.shape[1])
    return np.mod(a @ b, p)


def inv_scalar(x: int, p: int) -> int:
    x = int(x) % p
    if x == 0:
        raise ZeroDivisionError("zero has no inverse")
    return pow(x, p - 2, p)


def rref(m: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot column indices."""
    r_mat = as_field(m, p).copy()
    rows, cols = r_mat.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(r_mat[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            r_mat[[r, k]] = r_mat[[k, r]]
        piv = inv_scalar(r_mat[r, c], p)
        r_mat[r] = np.mod(r_mat[r] * piv, p)
        col = r_mat[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            r_mat[hit] = np.mod(r_mat[hit] - np.outer(col[hit], r_mat[r]), p)
        pivots.append(c)
        r += 1
    return r_mat, pivots


def rank(m: np.ndarray, p: int) -> int:
    if m.size == 0:
        return 0
    return len(rref(m, p)[1])


def kernel_basis(m: np.ndarray, p: int) -> np.ndarray:
    """Columns spanning the right null space of ``m``."""
    rows, cols = m.shape
    if cols == 0:
        return zeros(0, 0)
    if rows == 0:
        return identity(cols)
    r_mat, pivots = rref(m, p)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = zeros(cols, len(free))
    for j, f in enumerate(free):
        basis[f, j] = 1
        for i, pc in enumerate(pivots):
            basis[pc, j] = (-r_mat[i, f]) % p
    return basis


def independent_columns(m: np.ndarray, p: int) -> list[int]:
    """Indices of a maximal set of independent columns, chosen greedily left to right."""
    if m.size == 0:
        return []
    return rref(m, p)[1]


def image_basis(m: np.ndarray, p: int) -> np.ndarray:
    return m[:, independent_columns(m, p)]


def extend_columns(base: np.ndarray, candidates: np.ndarray, p: int) -> list[int]:
    """Indices of candidate columns that extend span(base) independently."""
    k = base.shape[1]
    joined = np.concatenate([base, candidates], axis=1)
    return [c - k for c in independent_columns(joined, p) if c >= k]


def solve(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray | None:
    """One solution ``x`` of ``a @ x = b`` or None when inconsistent."""
    rows, cols = a.shape
    b2 = b if b.ndim == 2 else b.reshape(rows, 1)
    if cols == 0:
        return zeros(0, b2.shape[1]) if not np.any(np.mod(b2, p)) else None
    aug = np.concatenate([as_field(a, p), as_field(b2, p)], axis=1)
    r_mat, pivots = rref(aug, p)
    if pivots and pivots[-1] >= cols:
        return None
    x = zeros(cols, b2.shape[1])
    for i, pc in enumerate(pivots):
        x[pc] = r_mat[i, cols:]
    return x


def inverse(a: np.ndarray, p: int) -> np.ndarray:
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    x = solve(a, identity(n), p)
    if x is None or rank(a, p) < n:
        raise ZeroDivisionError("singular matrix")
    return x


def left_inverse(a: np.ndarray, p: int) -> np.ndarray:
    """Some ``L`` with ``L @ a = I`` for ``a`` of full column rank."""
    n, k = a.shape
    if k == 0:
        return zeros(0, n)
    rows = independent_columns(a.T, p)
    if len(rows) < k:
        raise ValueError("matrix does not have full column rank")
    sub_inv = inverse(a[rows], p)
    out = zeros(k, n)
    out[:, rows] = sub_inv
    return out


def cokernel_projection(m: np.ndarray, p: int) -> np.ndarray:
    """A surjection ``Q`` from the target of ``m`` with ``ker Q = im m``."""
    n = m.shape[0]
    img = image_basis(m, p)
    extra = extend_columns(img, identity(n), p)
    basis = np.concatenate([img, identity(n)[:, extra]], axis=1)
    inv = inverse(basis, p)
    return inv[img.shape[1]:]


def block_diag(blocks: list[np.ndarray]) -> np.ndarray:
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = zeros(rows, cols)
    r = c = 0
    for b in blocks:
        out[r:r + b.shape[0], c:c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out


def random_matrix(rng: np.random.Generator, rows: int, cols: int, p: int) -> np.ndarray:
    return rng.integers(0, p, size=(rows, cols), dtype=np.int64)
