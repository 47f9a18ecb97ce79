"""Gaussian elimination over a :class:`FieldSpec` on index arrays."""

from __future__ import annotations

import numpy as np

from .field import FieldSpec


def rref(F: FieldSpec, M) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns (zero rows dropped)."""
    A = np.array(M, dtype=np.int32, copy=True)
    if A.ndim != 2:
        A = A.reshape(-1, A.shape[-1] if A.ndim else 0)
    rows, cols = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        A[r] = F.mul[F.inv[A[r, c]], A[r]]
        others = np.flatnonzero(A[:, c])
        others = others[others != r]
        if others.size:
            factors = F.neg[A[others, c]]
            A[others] = F.add[A[others], F.mul[factors[:, None], A[r][None, :]]]
        pivots.append(c)
        r += 1
    return A[:r], pivots


def rank(F: FieldSpec, M) -> int:
    M = np.asarray(M)
    if M.size == 0:
        return 0
    return len(rref(F, M)[1])


def nullspace(F: FieldSpec, M, ncols: int | None = None) -> np.ndarray:
    """Basis (rows) of {x : M x = 0}, one vector per free column.

    Each basis vector has a 1 at its free column and 0 at the other free
    columns, so the free columns serve as coordinates on the kernel.
    """
    M = np.asarray(M, dtype=np.int32)
    n = M.shape[1] if M.ndim == 2 and M.shape[1] else (ncols or 0)
    if M.size == 0:
        return np.eye(n, dtype=np.int32)
    R, piv = rref(F, M)
    free = [c for c in range(n) if c not in piv]
    basis = np.zeros((len(free), n), dtype=np.int32)
    for j, f in enumerate(free):
        basis[j, f] = 1
        for i, pc in enumerate(piv):
            basis[j, pc] = F.neg[R[i, f]]
    return basis


def solve(F: FieldSpec, M, b) -> np.ndarray | None:
    """One solution x of M x = b, or None if inconsistent."""
    M = np.asarray(M, dtype=np.int32)
    b = np.asarray(b, dtype=np.int32).reshape(-1, 1)
    n = M.shape[1]
    aug = np.concatenate([M, b], axis=1) if M.size else b
    R, piv = rref(F, aug)
    if n in piv:
        return None
    x = np.zeros(n, dtype=np.int32)
    for i, pc in enumerate(piv):
        x[pc] = R[i, n]
    return x


def matvec(F: FieldSpec, M: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rows of M dotted with v (v may be a batch with leading axes)."""
    prods = F.mul[M, v[..., None, :]] if v.ndim > 1 else F.mul[M, v[None, :]]
    acc = prods[..., 0]
    for j in range(1, prods.shape[-1]):
        acc = F.add[acc, prods[..., j]]
    return acc


def dot_rows(F: FieldSpec, A: np.ndarray, w: np.ndarray) -> np.ndarray:
    """sum_j A[..., j] * w[j] for a fixed vector w."""
    if A.shape[-1] == 0:
        return np.zeros(A.shape[:-1], dtype=np.int32)
    prods = F.mul[A, w]
    acc = prods[..., 0]
    for j in range(1, A.shape[-1]):
        acc = F.add[acc, prods[..., j]]
    return acc


def span_elements(F: FieldSpec, basis: np.ndarray) -> np.ndarray:
    """All F-linear combinations of the rows, coefficient vectors in lex order."""
    basis = np.asarray(basis, dtype=np.int32)
    s, n = basis.shape
    out = np.zeros((1, n), dtype=np.int32)
    for j in range(s):
        terms = F.mul[np.arange(F.q, dtype=np.int32)[:, None], basis[j][None, :]]
        out = F.add[out[:, None, :], terms[None, :, :]].reshape(-1, n)
    return out


def lex_index(vectors: np.ndarray, q: int) -> np.ndarray:
    """Index of coordinate vectors in the lexicographic enumeration (first coord most significant)."""
    idx = np.zeros(vectors.shape[:-1], dtype=np.int64)
    for j in range(vectors.shape[-1]):
        idx = idx * q + vectors[..., j]
    return idx


def lex_vectors(count_dims: int, q: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    total = q**count_dims
    stop = total if stop is None else stop
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.zeros((idx.size, count_dims), dtype=np.int32)
    for j in range(count_dims - 1, -1, -1):
        out[:, j] = idx % q
        idx //= q
    return out
