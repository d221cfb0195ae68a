"""BD-LRPC code instances: parity-check matrices supported on V_{alpha,d}.

Words over F_{q^m} of length n are (n, m) integer arrays (one coordinate row
per symbol). Every parity-check entry h_{i,j} lies in V_{alpha,d}, so it is
stored through its coefficient tensor ``h_coef[i, j, v]`` with
h_{i,j} = sum_v h_coef[i, j, v] * alpha^v.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from bdlrpc import linalg
from bdlrpc.exceptions import ConsistencyError, ConstructionError, ParameterError
from bdlrpc.field import FieldContext, field_make, is_prime
from bdlrpc.subspace import Subspace, random_subspace, span

__all__ = [
    "CodeParams",
    "CodeInstance",
    "sample_code",
    "build_code",
    "build_h_ext",
    "check_unique_decoding",
    "check_maximal_row_span",
    "syndrome",
    "encode",
    "sample_codeword",
    "sample_error",
    "word_rank",
    "ext_rref",
    "code_to_json",
    "code_from_json",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CodeParams:
    q: int
    m: int
    n: int
    k: int
    d: int

    def __post_init__(self) -> None:
        if not is_prime(self.q):
            raise ParameterError(f"q must be prime, got {self.q}")
        if not 0 < self.k < self.n:
            raise ParameterError(f"need 0 < k < n, got k={self.k}, n={self.n}")
        if not 1 <= self.d <= self.m:
            raise ParameterError(f"need 1 <= d <= m, got d={self.d}, m={self.m}")

    @property
    def redundancy(self) -> int:
        return self.n - self.k

    @property
    def unique_decoding_possible(self) -> bool:
        """d >= n/(n-k), the dimension gate of the unique-decoding property."""
        return self.d * (self.n - self.k) >= self.n


def ext_rref(ctx: FieldContext, M: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of a matrix over F_{q^m}, shape (rows, cols, m)."""
    M = ctx.asarray(M).copy()
    rows, cols, _ = M.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(M[r:, c].any(axis=1))
        if nz.size == 0:
            continue
        p = r + nz[0]
        if p != r:
            M[[r, p]] = M[[p, r]]
        M[r] = M[r] @ ctx.mul_matrix(ctx.inv(M[r, c])) % ctx.q
        for i in range(rows):
            if i != r and M[i, c].any():
                M[i] = (M[i] - M[r] @ ctx.mul_matrix(M[i, c])) % ctx.q
        pivots.append(c)
        r += 1
    return M, pivots


def _ext_kernel(ctx: FieldContext, R: np.ndarray, pivots: list[int]) -> np.ndarray:
    cols = R.shape[1]
    free = [c for c in range(cols) if c not in set(pivots)]
    K = np.zeros((len(free), cols, ctx.m), dtype=np.int64)
    for i, f in enumerate(free):
        K[i, f] = ctx.one()
        for row, p in enumerate(pivots):
            K[i, p] = (-R[row, f]) % ctx.q
    return K


def _linear_map(ctx: FieldContext, A: np.ndarray) -> np.ndarray:
    """F_q matrix of x -> x A^T for a matrix A over F_{q^m} of shape (rows, cols, m).

    Returns shape (cols*m, rows*m) acting on flattened (cols, m) row vectors.
    """
    rows, cols, m = A.shape
    mm = ctx.mul_matrix(A)  # (rows, cols, m, m)
    return mm.transpose(1, 2, 0, 3).reshape(cols * m, rows * m)


def build_h_ext(ctx: FieldContext, H: np.ndarray, d: int) -> np.ndarray:
    """Stack the d coefficient rows of every parity-check row: shape ((n-k)d, n)."""
    H = ctx.asarray(H)
    if H.ndim != 3:
        raise ParameterError("H must have shape (n-k, n, m)")
    if d > ctx.m:
        raise ParameterError("d exceeds m")
    if ctx.m > 1 and np.any(H[..., d:]):
        raise ConsistencyError("an entry of H lies outside V_{alpha,d}")
    coef = H[..., :d] if ctx.m > 1 else H
    return coef.transpose(0, 2, 1).reshape(H.shape[0] * d, H.shape[1])


@dataclass(frozen=True, eq=False)
class CodeInstance:
    params: CodeParams
    ctx: FieldContext
    h_coef: np.ndarray
    H: np.ndarray = field(repr=False)
    H_ext: np.ndarray = field(repr=False)
    G: np.ndarray = field(repr=False)
    H_rank: int
    maximal_row_span: bool
    unique_decoding: bool
    _syndrome_map: np.ndarray = field(repr=False)
    _encode_map: np.ndarray = field(repr=False)

    @property
    def flags(self) -> dict[str, bool]:
        return {"maximal_row_span": self.maximal_row_span, "unique_decoding": self.unique_decoding}


def _coef_to_H(ctx: FieldContext, h_coef: np.ndarray) -> np.ndarray:
    nk, n, d = h_coef.shape
    if ctx.m == 1:
        return h_coef.copy()
    H = np.zeros((nk, n, ctx.m), dtype=np.int64)
    H[..., :d] = h_coef
    return H


def build_code(params: CodeParams, h_coef, ctx: FieldContext | None = None) -> CodeInstance:
    """Assemble a code from its coefficient tensor; flags are computed, not trusted."""
    ctx = ctx or field_make(params.q, params.m)
    h_coef = np.asarray(h_coef, dtype=np.int64) % params.q
    nk, n, d = params.n - params.k, params.n, params.d
    if h_coef.shape != (nk, n, d):
        raise ParameterError(f"h_coef must have shape {(nk, n, d)}, got {h_coef.shape}")
    H = _coef_to_H(ctx, h_coef)
    H_ext = build_h_ext(ctx, H, d)
    R, pivots = ext_rref(ctx, H)
    G = _ext_kernel(ctx, R, pivots)
    return CodeInstance(
        params=params,
        ctx=ctx,
        h_coef=h_coef,
        H=H,
        H_ext=H_ext,
        G=G,
        H_rank=len(pivots),
        maximal_row_span=_maximal_row_span(h_coef, params.q),
        unique_decoding=_unique_decoding(params, H_ext),
        _syndrome_map=_linear_map(ctx, H),
        _encode_map=_linear_map(ctx, G.transpose(1, 0, 2)) if G.shape[0] else np.zeros((0, n * ctx.m), dtype=np.int64),
    )


def _entries_span_full(h_coef: np.ndarray, q: int) -> bool:
    d = h_coef.shape[2]
    return linalg.rank(h_coef.reshape(-1, d), q) == d


def _maximal_row_span(h_coef: np.ndarray, q: int) -> bool:
    d = h_coef.shape[2]
    return all(linalg.rank(row, q) == d for row in h_coef)


def _unique_decoding(params: CodeParams, H_ext: np.ndarray) -> bool:
    if not params.unique_decoding_possible:
        return False
    return linalg.rank(H_ext, params.q) == params.n


def check_unique_decoding(instance: CodeInstance) -> bool:
    """d >= n/(n-k) and the columns of H_ext are independent."""
    return _unique_decoding(instance.params, instance.H_ext)


def check_maximal_row_span(instance: CodeInstance) -> bool:
    """Every row of H spans V_{alpha,d} on its own."""
    return _maximal_row_span(instance.h_coef, instance.params.q)


def sample_code(
    params: CodeParams,
    rng: np.random.Generator,
    *,
    maximal_row_span: bool = True,
    unique_decoding: bool = True,
    max_tries: int = 1000,
) -> CodeInstance:
    """Draw h_{i,j,v} uniformly and resample until the required properties hold.

    Always required: the entries of H span exactly V_{alpha,d} and the rows of
    H are independent over F_{q^m}.
    """
    if unique_decoding and not params.unique_decoding_possible:
        raise ParameterError(
            f"unique decoding needs d >= n/(n-k); got d={params.d}, n={params.n}, k={params.k}"
        )
    ctx = field_make(params.q, params.m)
    q, nk, n, d = params.q, params.n - params.k, params.n, params.d
    failures: Counter[str] = Counter()
    for _ in range(max_tries):
        h_coef = rng.integers(0, q, size=(nk, n, d), dtype=np.int64)
        if not _entries_span_full(h_coef, q):
            failures["entry span != V_{alpha,d}"] += 1
            continue
        if maximal_row_span and not _maximal_row_span(h_coef, q):
            failures["maximal-row-span"] += 1
            continue
        if unique_decoding:
            H_ext = h_coef.transpose(0, 2, 1).reshape(nk * d, n)
            if linalg.rank(H_ext, q) != n:
                failures["unique-decoding"] += 1
                continue
        inst = build_code(params, h_coef, ctx)
        if inst.H_rank != nk:
            failures["row independence over F_{q^m}"] += 1
            continue
        if sum(failures.values()):
            log.debug("sample_code rejections: %s", dict(failures))
        return inst
    worst = failures.most_common(1)[0][0] if failures else "unknown"
    raise ConstructionError(f"no admissible H in {max_tries} draws; most frequent failure: {worst}")


def _check_word(instance: CodeInstance, y, length: int) -> np.ndarray:
    y = instance.ctx.asarray(y)
    if y.shape != (length, instance.ctx.m):
        raise ParameterError(f"expected a word of shape {(length, instance.ctx.m)}, got {y.shape}")
    return y


def syndrome(instance: CodeInstance, y) -> np.ndarray:
    """s = y H^T, shape (n-k, m)."""
    p = instance.params
    y = _check_word(instance, y, p.n)
    s = y.reshape(-1) @ instance._syndrome_map % p.q
    return s.reshape(p.n - p.k, instance.ctx.m)


def encode(instance: CodeInstance, message) -> np.ndarray:
    """c = message G (row-vector convention)."""
    p = instance.params
    msg = _check_word(instance, message, p.k)
    c = msg.reshape(-1) @ instance._encode_map % p.q
    return c.reshape(p.n, instance.ctx.m)


def sample_codeword(instance: CodeInstance, rng: np.random.Generator) -> np.ndarray:
    return encode(instance, instance.ctx.random(rng, (instance.params.k,)))


def sample_error(ctx: FieldContext, n: int, r: int, rng: np.random.Generator) -> np.ndarray:
    """e = eps E with eps a basis of a uniform r-dim support and E uniform of rank r."""
    if not 0 <= r <= min(n, ctx.m):
        raise ParameterError(f"rank {r} impossible for length {n} over F_q^{ctx.m}")
    if r == 0:
        return np.zeros((n, ctx.m), dtype=np.int64)
    eps = random_subspace(ctx, r, rng).basis
    E = linalg.sample_full_rank(ctx.q, r, n, r, rng)
    return E.T @ eps % ctx.q


def word_rank(ctx: FieldContext, w) -> int:
    return span(ctx, ctx.asarray(w)).dim


def support(ctx: FieldContext, w) -> Subspace:
    return span(ctx, ctx.asarray(w))


def code_to_json(instance: CodeInstance) -> dict:
    p = instance.params
    return {
        "params": {"q": p.q, "m": p.m, "n": p.n, "k": p.k, "d": p.d},
        "modulus_poly": list(instance.ctx.modulus),
        "H": instance.h_coef.tolist(),
        "flags": instance.flags,
    }


def code_from_json(obj: dict) -> CodeInstance:
    params = CodeParams(**{k: int(v) for k, v in obj["params"].items()})
    ctx = FieldContext(params.q, params.m, tuple(obj["modulus_poly"]))
    inst = build_code(params, np.array(obj["H"], dtype=np.int64), ctx)
    stored = obj.get("flags")
    if stored is not None and stored != inst.flags:
        log.warning("stored flags %s differ from recomputed %s", stored, inst.flags)
    return inst
