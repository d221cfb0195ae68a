"""Decoding BD-LRPC codes by syndrome-support expansion and successive intersections.

The decoder runs in three phases:

1. expand the syndrome support S to V_{alpha,t} S, which should equal
   V_{alpha,d+t-1} E for the unknown error support E;
2. peel one power of alpha at a time with F <- (alpha^-1 F) ∩ F until the
   support E is left;
3. erasure-decode: express the syndrome on the products eps_u alpha^v and
   solve the expanded system H_ext e_u = s_u for each basis element eps_u.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from bdlrpc import linalg
from bdlrpc.code import CodeInstance, syndrome
from bdlrpc.exceptions import ParameterError
from bdlrpc.subspace import Subspace, bounded_degree, intersect, product, scalar_mul, span

__all__ = [
    "DecoderConfig",
    "DecodeOutcome",
    "STAGES",
    "recommended_t",
    "expand_syndrome_support",
    "recover_support",
    "erasure_decode",
    "decode",
]

STAGES = ("zero-support", "syndrome-decomposition", "erasure-system", "verification")


def recommended_t(r: int, d: int, n: int, k: int) -> int:
    """ceil(r(d-1)/u) + 1 with u = n-k-r; close to optimal in practice."""
    u = n - k - r
    if u <= 0:
        raise ParameterError(f"u = n-k-r must be positive, got {u}")
    return math.ceil(r * (d - 1) / u) + 1


@dataclass(frozen=True)
class DecoderConfig:
    t: int = 2
    verify_final: bool = True

    def __post_init__(self) -> None:
        if self.t < 1:
            raise ParameterError(f"t must be >= 1, got {self.t}")


@dataclass(frozen=True, eq=False)
class DecodeOutcome:
    success: bool
    codeword: np.ndarray | None = None
    error: np.ndarray | None = None
    support: Subspace | None = None
    stage: str | None = None

    @property
    def status(self) -> str:
        return "success" if self.success else "failure"

    def to_dict(self, ctx=None) -> dict:
        out: dict = {"status": self.status}
        if self.success:
            fmt = (lambda w: [ctx.format(x) for x in w]) if ctx is not None else (lambda w: w.tolist())
            out["codeword"] = fmt(self.codeword)
            out["error"] = fmt(self.error)
            out["support_dim"] = self.support.dim if self.support is not None else 0
        else:
            out["stage"] = self.stage
        return out

    def to_json(self, ctx=None) -> str:
        return json.dumps(self.to_dict(ctx))


def expand_syndrome_support(S: Subspace, t: int) -> Subspace:
    """V_{alpha,t} S."""
    if t < 1:
        raise ParameterError(f"t must be >= 1, got {t}")
    if S.is_zero():
        return S
    return product(bounded_degree(S.ctx, t), S)


def recover_support(F: Subspace, steps: int) -> Subspace:
    """Apply F <- (alpha^-1 F) ∩ F ``steps`` times."""
    if steps < 0:
        raise ParameterError("steps must be >= 0")
    alpha_inv = F.ctx.alpha_power(-1)
    for _ in range(steps):
        if F.is_zero():
            break
        F = intersect(scalar_mul(alpha_inv, F), F)
    return F


def _decompose_syndrome(instance: CodeInstance, eps: np.ndarray, s: np.ndarray) -> np.ndarray | None:
    """Coefficients s_{i,u,v} with s_i = sum_{u,v} s_{i,u,v} eps_u alpha^v.

    Returns an array of shape (n-k, r, d), or None if no decomposition exists.
    """
    ctx, d = instance.ctx, instance.params.d
    r = eps.shape[0]
    prods = np.stack([ctx.mul(eps, ctx.alpha_power(v)) for v in range(d)], axis=1)  # (r, d, m)
    C = prods.reshape(r * d, ctx.m)
    sol = linalg.solve(C.T, s.T, ctx.q)
    if sol is None:
        return None
    return sol.particular.T.reshape(s.shape[0], r, d)


def erasure_decode(instance: CodeInstance, E: Subspace, s) -> np.ndarray | str:
    """Error e with supp(e) ⊆ E and e H^T = s.

    Returns the error word, or the failing stage name
    ("syndrome-decomposition" or "erasure-system") when no solution exists.
    """
    ctx, p = instance.ctx, instance.params
    s = ctx.asarray(s)
    if s.shape != (p.n - p.k, ctx.m):
        raise ParameterError(f"syndrome must have shape {(p.n - p.k, ctx.m)}")
    if E.dim == 0:
        if s.any():
            return "syndrome-decomposition"
        return np.zeros((p.n, ctx.m), dtype=np.int64)
    eps = E.basis
    coeffs = _decompose_syndrome(instance, eps, s)
    if coeffs is None:
        return "syndrome-decomposition"
    # right-hand side for basis element u: (s_{1,u,0}, ..., s_{1,u,d-1}, s_{2,u,0}, ...)
    rhs = coeffs.transpose(0, 2, 1).reshape((p.n - p.k) * p.d, E.dim)
    sol = linalg.solve(instance.H_ext, rhs, ctx.q)
    if sol is None:
        return "erasure-system"
    return sol.particular @ eps % ctx.q


def decode(instance: CodeInstance, y, config: DecoderConfig | None = None) -> DecodeOutcome:
    config = config or DecoderConfig()
    if not instance.unique_decoding:
        warnings.warn("code lacks the unique-decoding property; decoded errors may not be unique", stacklevel=2)
    ctx, p = instance.ctx, instance.params
    y = ctx.asarray(y)
    s = syndrome(instance, y)
    if not s.any():
        return DecodeOutcome(True, y.copy(), np.zeros_like(y), span(ctx, []))
    S = span(ctx, s)
    F = expand_syndrome_support(S, config.t)
    E = recover_support(F, p.d + config.t - 2)
    if E.is_zero():
        return DecodeOutcome(False, stage="zero-support")
    e = erasure_decode(instance, E, s)
    if isinstance(e, str):
        return DecodeOutcome(False, stage=e, support=E)
    c = (y - e) % ctx.q
    if config.verify_final and syndrome(instance, c).any():
        return DecodeOutcome(False, stage="verification", support=E)
    return DecodeOutcome(True, c, e, E)
