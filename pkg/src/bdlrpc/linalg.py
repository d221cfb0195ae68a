"""Dense linear algebra over the prime field F_q.

Matrices are plain 2-D integer numpy arrays with entries in [0, q); the
modulus is passed explicitly.  ``batch_rank`` handles stacks of matrices for
the Monte Carlo estimators.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from bdlrpc.exceptions import ParameterError

__all__ = [
    "RrefResult",
    "Solution",
    "rref",
    "rank",
    "kernel",
    "solve",
    "matmul",
    "batch_rank",
    "sample_matrix",
    "sample_full_rank",
    "matrix_to_json",
    "matrix_from_json",
]


@functools.lru_cache(maxsize=None)
def inverse_table(q: int) -> np.ndarray:
    tab = np.zeros(q, dtype=np.int64)
    for x in range(1, q):
        tab[x] = pow(x, q - 2, q)
    return tab


def _as_matrix(A, q: int) -> np.ndarray:
    A = np.array(A, dtype=np.int64, copy=True)
    if A.ndim != 2:
        raise ParameterError(f"expected a 2-D matrix, got shape {A.shape}")
    return A % q


@dataclass(frozen=True)
class RrefResult:
    rref: np.ndarray
    rank: int
    pivot_cols: tuple[int, ...]


@dataclass(frozen=True)
class Solution:
    """Particular solution plus a kernel basis (rows)."""

    particular: np.ndarray
    kernel: np.ndarray


def _rref_inplace(A: np.ndarray, q: int, ncols: int | None = None) -> list[int]:
    rows, cols = A.shape
    ncols = cols if ncols is None else ncols
    inv = inverse_table(q)
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        p = r + nz[0]
        if p != r:
            A[[r, p]] = A[[p, r]]
        if A[r, c] != 1:
            A[r] = A[r] * inv[A[r, c]] % q
        others = np.flatnonzero(A[:, c])
        others = others[others != r]
        if others.size:
            A[others] = (A[others] - np.outer(A[others, c], A[r])) % q
        pivots.append(c)
        r += 1
    return pivots


def rref(A, q: int) -> RrefResult:
    """Reduced row echelon form; the canonical representative of the row space."""
    M = _as_matrix(A, q)
    pivots = _rref_inplace(M, q)
    return RrefResult(M, len(pivots), tuple(pivots))


def rank(A, q: int) -> int:
    return rref(A, q).rank


def kernel(A, q: int) -> np.ndarray:
    """Basis (as rows) of the right kernel {x : A x = 0}."""
    res = rref(A, q)
    return _kernel_from_rref(res.rref, res.pivot_cols, np.shape(A)[1], q)


def _kernel_from_rref(R: np.ndarray, pivots, cols: int, q: int) -> np.ndarray:
    free = [c for c in range(cols) if c not in set(pivots)]
    K = np.zeros((len(free), cols), dtype=np.int64)
    for i, f in enumerate(free):
        K[i, f] = 1
        for row, p in enumerate(pivots):
            K[i, p] = (-R[row, f]) % q
    return K


def solve(A, b, q: int) -> Solution | None:
    """Solve A x = b over F_q.

    ``b`` may be a vector or a matrix of right-hand sides (one per column).
    Returns None when the system is inconsistent.
    """
    A = _as_matrix(A, q)
    b = np.asarray(b, dtype=np.int64) % q
    vector = b.ndim == 1
    B = b[:, None] if vector else b
    rows, cols = A.shape
    if B.shape[0] != rows:
        raise ParameterError(f"dimension mismatch: A is {A.shape}, b has {B.shape[0]} rows")
    aug = np.concatenate([A, B], axis=1)
    pivots = _rref_inplace(aug, q, ncols=cols)
    r = len(pivots)
    if np.any(aug[r:, cols:]):
        return None
    X = np.zeros((cols, B.shape[1]), dtype=np.int64)
    for row, p in enumerate(pivots):
        X[p] = aug[row, cols:]
    K = _kernel_from_rref(aug[:, :cols], pivots, cols, q)
    return Solution(X[:, 0] if vector else X, K)


def matmul(A, B, q: int) -> np.ndarray:
    return (np.asarray(A, dtype=np.int64) @ np.asarray(B, dtype=np.int64)) % q


def _batch_rank_gf2(mats: np.ndarray) -> np.ndarray:
    # Rows bit-packed into uint64 words (one word per 64 columns).
    B, R, C = mats.shape
    nwords = (C + 63) // 64
    packed = np.zeros((B, R, nwords), dtype=np.uint64)
    bits = mats.astype(np.uint64) & np.uint64(1)
    for c in range(C):
        packed[:, :, c // 64] |= bits[:, :, c] << np.uint64(c % 64)
    rk = np.zeros(B, dtype=np.int64)
    bidx = np.arange(B)
    for c in range(C):
        w, sh = c // 64, np.uint64(c % 64)
        colbit = ((packed[:, :, w] >> sh) & np.uint64(1)).astype(bool)
        usable = colbit
        has = usable.any(axis=1)
        if not has.any():
            continue
        piv = usable.argmax(axis=1)
        b = bidx[has]
        prow = packed[b, piv[has]]  # (nb, nwords)
        # pivot row is retired by clearing it; other rows carrying the bit are reduced
        sub = packed[b]
        hit = colbit[b].copy()
        hit[np.arange(b.size), piv[has]] = False
        sub ^= np.where(hit[:, :, None], prow[:, None, :], np.uint64(0))
        sub[np.arange(b.size), piv[has]] = 0
        packed[b] = sub
        rk[b] += 1
    return rk


def _batch_rank_generic(mats: np.ndarray, q: int) -> np.ndarray:
    M = mats.astype(np.int64) % q
    B, R, C = M.shape
    inv = inverse_table(q)
    rk = np.zeros(B, dtype=np.int64)
    bidx = np.arange(B)
    for c in range(C):
        col = M[:, :, c]
        nz = col != 0
        has = nz.any(axis=1)
        if not has.any():
            continue
        piv = nz.argmax(axis=1)
        b = bidx[has]
        p = piv[has]
        prow = M[b, p]
        prow = prow * inv[prow[:, c]][:, None] % q
        sub = M[b]
        factors = sub[:, :, c].copy()
        sub = (sub - factors[:, :, None] * prow[:, None, :]) % q
        sub[np.arange(b.size), p] = 0
        M[b] = sub
        rk[b] += 1
    return rk


def batch_rank(mats, q: int) -> np.ndarray:
    """Ranks of a stack of matrices with shape (batch, rows, cols)."""
    mats = np.asarray(mats)
    if mats.ndim != 3:
        raise ParameterError("batch_rank expects a 3-D array")
    if mats.shape[0] == 0 or mats.shape[1] == 0 or mats.shape[2] == 0:
        return np.zeros(mats.shape[0], dtype=np.int64)
    if q == 2:
        return _batch_rank_gf2(mats)
    return _batch_rank_generic(mats, q)


def sample_matrix(q: int, rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(0, q, size=(rows, cols), dtype=np.int64)


def sample_full_rank(
    q: int, rows: int, cols: int, target_rank: int, rng: np.random.Generator, max_tries: int = 100_000
) -> np.ndarray:
    """Uniform matrix of rank exactly ``target_rank`` (by rejection).

    Only ``target_rank == min(rows, cols)`` is efficient; lower targets are
    accepted but may need many draws.
    """
    if not 0 <= target_rank <= min(rows, cols):
        raise ParameterError(f"rank {target_rank} impossible for a {rows}x{cols} matrix")
    for _ in range(max_tries):
        A = sample_matrix(q, rows, cols, rng)
        if rank(A, q) == target_rank:
            return A
    raise ParameterError(f"no rank-{target_rank} sample in {max_tries} draws")


def matrix_to_json(A, q: int) -> dict:
    A = np.asarray(A, dtype=np.int64)
    return {"q": int(q), "rows": int(A.shape[0]), "cols": int(A.shape[1]), "entries": [int(x) for x in A.ravel()]}


def matrix_from_json(obj: dict) -> tuple[np.ndarray, int]:
    q, rows, cols = int(obj["q"]), int(obj["rows"]), int(obj["cols"])
    entries = obj["entries"]
    if len(entries) != rows * cols:
        raise ParameterError("entries length does not match rows*cols")
    A = np.array(entries, dtype=np.int64).reshape(rows, cols)
    if np.any((A < 0) | (A >= q)):
        raise ParameterError("entries must lie in [0, q)")
    return A, q
