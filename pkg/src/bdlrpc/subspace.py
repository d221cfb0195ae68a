"""F_q-subspaces of F_{q^m}.

A :class:`Subspace` stores its basis as a reduced row echelon matrix over
F_q with one row per basis element (the element's coordinates), so two
subspaces are equal exactly when their basis arrays are equal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from bdlrpc import linalg
from bdlrpc.exceptions import ParameterError
from bdlrpc.field import FieldContext, FieldElement

__all__ = [
    "Subspace",
    "span",
    "bounded_degree",
    "product",
    "intersect",
    "subspace_sum",
    "scalar_mul",
    "random_subspace",
]


@dataclass(frozen=True, eq=False)
class Subspace:
    ctx: FieldContext
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def is_zero(self) -> bool:
        return self.dim == 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ctx == other.ctx and np.array_equal(self.basis, other.basis)

    def __hash__(self) -> int:
        return hash((self.ctx, self.basis.tobytes(), self.basis.shape))

    def __contains__(self, x) -> bool:
        return self.contains(x)

    def contains(self, x) -> bool:
        v = self.ctx.asarray(x)
        if self.dim == self.ctx.m:
            return True
        stacked = np.vstack([self.basis, v[None, :]])
        return linalg.rank(stacked, self.ctx.q) == self.dim

    def issubspace(self, other: Subspace) -> bool:
        _same_ctx(self, other)
        return subspace_sum(self, other).dim == other.dim

    def __repr__(self) -> str:
        rows = ", ".join(self.ctx.format(r) for r in self.basis) if self.ctx.q <= 36 else "..."
        return f"Subspace(dim={self.dim}, basis=[{rows}])"

    def to_json(self) -> dict:
        return linalg.matrix_to_json(self.basis.reshape(self.dim, self.ctx.m), self.ctx.q)

    @classmethod
    def from_json(cls, ctx: FieldContext, obj: dict) -> Subspace:
        A, q = linalg.matrix_from_json(obj)
        if q != ctx.q or A.shape[1] != ctx.m:
            raise ParameterError("basis matrix does not match the field context")
        return span(ctx, A)


def _same_ctx(*subs: Subspace) -> None:
    ctx = subs[0].ctx
    for s in subs[1:]:
        if s.ctx != ctx:
            raise ParameterError("subspaces belong to different field contexts")


def span(ctx: FieldContext, vectors) -> Subspace:
    """F_q-span of a collection of elements (FieldElements or coordinate rows)."""
    if isinstance(vectors, np.ndarray):
        rows = vectors.reshape(-1, ctx.m) if vectors.size else np.zeros((0, ctx.m), dtype=np.int64)
    else:
        vectors = list(vectors)
        if not vectors:
            rows = np.zeros((0, ctx.m), dtype=np.int64)
        else:
            rows = np.stack([ctx.asarray(v) for v in vectors])
    res = linalg.rref(rows % ctx.q, ctx.q)
    return Subspace(ctx, res.rref[: res.rank].copy())


def bounded_degree(ctx: FieldContext, d: int) -> Subspace:
    """V_{alpha,d} = <1, alpha, ..., alpha^(d-1)>."""
    if not 1 <= d <= ctx.m:
        raise ParameterError(f"d must lie in [1, {ctx.m}], got {d}")
    return span(ctx, [ctx.alpha_power(i) for i in range(d)])


def product(E: Subspace, W: Subspace) -> Subspace:
    """Span of all products e*w, from the dim(E)*dim(W) basis products."""
    _same_ctx(E, W)
    ctx = E.ctx
    if E.dim == 0 or W.dim == 0:
        return Subspace(ctx, np.zeros((0, ctx.m), dtype=np.int64))
    prods = ctx.mul(E.basis[:, None, :], W.basis[None, :, :])
    return span(ctx, prods.reshape(-1, ctx.m))


def subspace_sum(U: Subspace, V: Subspace) -> Subspace:
    _same_ctx(U, V)
    return span(U.ctx, np.vstack([U.basis, V.basis]))


def intersect(U: Subspace, V: Subspace) -> Subspace:
    """U ∩ V by Zassenhaus: row-reduce [[U, U], [V, 0]] and keep the rows
    whose left half vanished."""
    _same_ctx(U, V)
    ctx = U.ctx
    m = ctx.m
    if U.dim == 0 or V.dim == 0:
        return Subspace(ctx, np.zeros((0, m), dtype=np.int64))
    block = np.zeros((U.dim + V.dim, 2 * m), dtype=np.int64)
    block[: U.dim, :m] = U.basis
    block[: U.dim, m:] = U.basis
    block[U.dim :, :m] = V.basis
    res = linalg.rref(block, ctx.q)
    R = res.rref[: res.rank]
    left_zero = ~R[:, :m].any(axis=1)
    return span(ctx, R[left_zero, m:])


def scalar_mul(c, U: Subspace) -> Subspace:
    """c*U for a nonzero scalar c in F_{q^m}."""
    ctx = U.ctx
    if isinstance(c, FieldElement):
        ctx._check(c)
    cv = ctx.asarray(c)
    if not cv.any():
        raise ParameterError("scalar must be nonzero")
    if U.dim == 0:
        return U
    return span(ctx, U.basis @ ctx.mul_matrix(cv) % ctx.q)


def random_subspace(ctx: FieldContext, r: int, rng: np.random.Generator) -> Subspace:
    """Uniformly random r-dimensional subspace: row space of a uniform rank-r r x m matrix."""
    if not 0 <= r <= ctx.m:
        raise ParameterError(f"dimension {r} out of range [0, {ctx.m}]")
    if r == 0:
        return Subspace(ctx, np.zeros((0, ctx.m), dtype=np.int64))
    A = linalg.sample_full_rank(ctx.q, r, ctx.m, r, rng)
    return span(ctx, A)
