"""Closed-form success probabilities and bounds for BD-LRPC decoding.

All formulas are evaluated in exact rational arithmetic (``fractions.Fraction``);
``Prob`` converts to a float on demand and keeps log10(1 - p) from the exact
complement, so failure rates far below double-precision epsilon stay
meaningful.

Notation: P_t is the probability that the block-Toeplitz matrix M_t built
from d random (n-k) x r blocks has full column rank r(d+t-1); u = n-k-r.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction

from bdlrpc.exceptions import ParameterError
from bdlrpc.field import is_prime

__all__ = [
    "Prob",
    "DomainViolation",
    "ProbParams",
    "LowerBound",
    "FailureBounds",
    "ProbReport",
    "gaussian_binomial",
    "full_rank_probability",
    "p1_classical",
    "p_opt_exact",
    "q_opt_exact",
    "p2_exact_d2",
    "r_term",
    "p_lower_bound",
    "p_corollary_bounds",
    "d2_remark_bound",
    "p_upper_bound",
    "hq",
    "conjecture_K",
    "choose_pt",
    "failure_bounds",
    "success_lower",
    "support_recovery_bound",
    "prob_report",
    "round_half_up",
    "table_rows",
    "curve_rows",
]

log = logging.getLogger(__name__)


def _qpow(q: int, e: int) -> Fraction:
    return Fraction(q**e) if e >= 0 else Fraction(1, q ** (-e))


@dataclass(frozen=True)
class Prob:
    """A probability (or bound) held exactly.

    ``raw`` is the formula's value before clamping to [0, 1]; ``kind`` is
    "exact", "bound" or "estimate"; ``in_radius`` is False when the
    parameters lie outside the range where the formula is meaningful.
    """

    raw: Fraction
    kind: str = "exact"
    in_radius: bool = True

    @property
    def exact(self) -> Fraction:
        if self.raw < 0:
            return Fraction(0)
        if self.raw > 1:
            return Fraction(1)
        return self.raw

    @property
    def clamped(self) -> bool:
        return not 0 <= self.raw <= 1

    @property
    def value(self) -> float:
        return float(self.exact)

    @property
    def complement(self) -> Fraction:
        return 1 - self.exact

    @property
    def log10_complement(self) -> float:
        c = self.complement
        if c == 0:
            return -math.inf
        return math.log10(c.numerator) - math.log10(c.denominator)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "log10_complement": self.log10_complement,
            "raw": float(self.raw),
            "clamped": self.clamped,
            "kind": self.kind,
            "in_radius": self.in_radius,
        }


def _prob(raw: Fraction, kind: str = "exact", in_radius: bool = True, name: str = "") -> Prob:
    p = Prob(Fraction(raw), kind, in_radius)
    if p.clamped:
        log.debug("clamped %s from %s to [0, 1]", name or "probability", float(p.raw))
    return p


@dataclass(frozen=True)
class DomainViolation:
    """Typed marker returned when a formula's hypotheses do not hold."""

    reason: str

    def to_dict(self) -> dict:
        return {"domain_violation": self.reason}


@dataclass(frozen=True)
class ProbParams:
    q: int
    n: int
    k: int
    d: int
    t: int
    r: int
    m: int | None = None

    def __post_init__(self) -> None:
        if not is_prime(self.q):
            raise ParameterError(f"q must be prime, got {self.q}")
        if not 0 < self.k < self.n:
            raise ParameterError(f"need 0 < k < n, got k={self.k}, n={self.n}")
        if self.d < 1 or self.t < 1 or self.r < 0:
            raise ParameterError("need d >= 1, t >= 1, r >= 0")
        if self.m is not None and self.m < 1:
            raise ParameterError("m must be positive")

    @property
    def nk(self) -> int:
        return self.n - self.k

    @property
    def u(self) -> int:
        return self.n - self.k - self.r


# ---------------------------------------------------------------------------
# building blocks


def gaussian_binomial(n: int, k: int, q: int) -> int:
    """Number of k-dimensional subspaces of F_q^n; 0 when k > n or k < 0."""
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q**n - q**i
        den *= q**k - q**i
    return num // den


def full_rank_probability(q: int, rows: int, cols: int) -> Fraction:
    """Probability that a uniform rows x cols matrix over F_q has rank cols."""
    if cols > rows:
        return Fraction(0)
    p = Fraction(1)
    for i in range(cols):
        p *= 1 - _qpow(q, i - rows)
    return p


def hq(n: int, q: int) -> Fraction:
    """H_q(n) = prod_{i=1}^{n} (1 - q^-i)."""
    p = Fraction(1)
    for i in range(1, n + 1):
        p *= 1 - _qpow(q, -i)
    return p


# ---------------------------------------------------------------------------
# P_t and related quantities


def p1_classical(q: int, n: int, k: int, d: int, r: int) -> Prob:
    """prod_{i=0}^{rd-1} (1 - q^-(n-k-i)): the classical LRPC first-phase probability."""
    return _prob(full_rank_probability(q, n - k, r * d))


def q_opt_exact(q: int, n: int, k: int, r: int) -> Fraction:
    """Q_{r(d-1)} = prod_{j=1}^{r} (1 - q^(j-(n-k)))."""
    nk = n - k
    p = Fraction(1)
    for j in range(1, r + 1):
        p *= 1 - _qpow(q, j - nk)
    return p


def p_opt_exact(q: int, n: int, k: int, r: int) -> Prob:
    """P_{r(d-1)}, the value of P_t for every t >= r(d-1) (d >= 2)."""
    if r < 0:
        raise ParameterError("r must be >= 0")
    return _prob(full_rank_probability(q, n - k, r) * q_opt_exact(q, n, k, r))


def p2_exact_d2(q: int, n: int, k: int, r: int) -> Prob:
    """Exact P_2 for d = 2: sum over the rank v of the (n-k-r) x r block Z."""
    if r == 0:
        return _prob(Fraction(1))
    nk = n - k
    u = nk - r
    if u <= 0:
        return _prob(Fraction(0))
    total = Fraction(0)
    for v in range(-(-r // 2), min(r, u) + 1):
        term = _qpow(q, -u * r)
        for i in range(v):
            term *= Fraction((q**u - q**i) * (q**r - q**i), q**v - q**i)
        for i in range(r - v):
            term *= 1 - _qpow(q, -v + i)
        total += term
    return _prob(full_rank_probability(q, nk, r) * total)


def r_term(q: int, n: int, k: int, d: int, r: int, j: int) -> Fraction:
    """R_j = q^(r(d-1) - u j) + sum_{i=1}^{j-1} [j i]_q q^(-u i)."""
    u = n - k - r
    val = _qpow(q, r * (d - 1) - u * j)
    for i in range(1, j):
        val += gaussian_binomial(j, i, q) * _qpow(q, -u * i)
    return val


@dataclass(frozen=True)
class LowerBound:
    prob: Prob
    argmin_j: int


def p_lower_bound(q: int, n: int, k: int, d: int, r: int, t: int) -> LowerBound | DomainViolation:
    """P_t >= 1 - min_{1<=j<=t} R_j, valid for ceil(r(d-1)/u) <= t <= rd."""
    u = n - k - r
    if u <= 0:
        return DomainViolation(f"u = n-k-r = {u} must be positive")
    if d < 2:
        return DomainViolation("bound requires d >= 2")
    if not -(-r * (d - 1) // u) <= t <= r * d:
        return DomainViolation(f"need ceil(r(d-1)/u) <= t <= rd, got t={t}")
    terms = [r_term(q, n, k, d, r, j) for j in range(1, t + 1)]
    best = min(range(t), key=lambda i: terms[i])
    return LowerBound(_prob(1 - terms[best], kind="bound", name="p_lower_bound"), best + 1)


def p_corollary_bounds(q: int, u: int, t: int) -> Prob | DomainViolation:
    """Closed-form lower bounds on P_t for t = ceil(r(d-1)/u) + 1."""
    if u <= 0:
        return DomainViolation(f"u = {u} must be positive")
    if t == 2:
        return _prob(1 - (q + 2) * _qpow(q, -u), kind="bound", name="corollary (i)")
    if 2 < t <= u:
        val = 1 - _qpow(q, -u) - Fraction(1, q - 1) * _qpow(q, -(u - t)) - Fraction(4, q**4 - 1) * _qpow(q, -2 * (u - t))
        return _prob(val, kind="bound", name="corollary (ii)")
    return DomainViolation(f"closed forms cover t = 2 or 2 < t <= u; got t={t}, u={u}")


def d2_remark_bound(q: int, u: int, as_printed: bool = True) -> float:
    """1 - (q^(-u/2) + q^-u + q^(-u+1)) / (1 - q), the d = 2, r >= u bound.

    With ``as_printed`` the denominator is 1 - q, which makes the value exceed 1;
    otherwise the sign-corrected denominator q - 1 is used.
    """
    num = q ** (-u / 2) + q ** (-u) + q ** (-u + 1)
    return 1 - num / ((1 - q) if as_printed else (q - 1))


def p_upper_bound(q: int, n: int, k: int, r: int) -> Prob:
    """(prod_{i=0}^{r-1} (1 - q^(i-(n-k))))^2: both X_1 and X_d must have rank r."""
    return _prob(full_rank_probability(q, n - k, r) ** 2, kind="bound")


def conjecture_K(q: int, d: int, r: int, u: int) -> Fraction:
    """K = H_q((d-1)r + u - 1) / H_q(u - 1)."""
    if u < 1:
        raise ParameterError(f"u must be >= 1, got {u}")
    return hq((d - 1) * r + u - 1, q) / hq(u - 1, q)


def choose_pt(p: ProbParams) -> tuple[Prob, str]:
    """Best available value for P_t: exact when a closed form applies, else the lower bound."""
    q, n, k, d, t, r = p.q, p.n, p.k, p.d, p.t, p.r
    if r == 0:
        return _prob(Fraction(1)), "trivial (r=0)"
    if r * (d + t - 1) > t * p.nk:
        return _prob(Fraction(0)), "exact (M_t has more columns than rows)"
    if d == 1:
        return _prob(full_rank_probability(q, p.nk, r)), "exact (d=1)"
    if t == 1:
        return p1_classical(q, n, k, d, r), "exact (t=1)"
    if t >= r * (d - 1):
        return p_opt_exact(q, n, k, r), "exact (t >= r(d-1))"
    if d == 2 and t == 2:
        return p2_exact_d2(q, n, k, r), "exact (d=2, t=2)"
    lb = p_lower_bound(q, n, k, d, r, t)
    assert isinstance(lb, LowerBound), lb
    return lb.prob, f"lower bound (min at j={lb.argmin_j})"


# ---------------------------------------------------------------------------
# overall success and failure


def _pt_fraction(p_t) -> Fraction:
    return p_t.raw if isinstance(p_t, Prob) else Fraction(p_t)


def support_recovery_bound(q: int, m: int, r: int, w: int) -> Prob:
    """1 - q^(r w) / (q^m - q^(r-1)): dim(V_{alpha,w} E) = r w for a random r-dim E."""
    if r == 0:
        return _prob(Fraction(1), kind="bound")
    return _prob(1 - _qpow(q, r * w) / (_qpow(q, m) - _qpow(q, r - 1)), kind="bound", in_radius=r * w <= m)


def success_lower(p: ProbParams, p_t) -> Prob:
    """(1 - q^(r(t+d)) / (q^m - q^(r-1))) * P_t."""
    if p.m is None:
        raise ParameterError("m is required")
    if p.r == 0:
        return _prob(Fraction(1), kind="bound")
    second = support_recovery_bound(p.q, p.m, p.r, p.d + p.t)
    in_radius = p.r * (p.d + p.t - 1) <= p.t * p.nk and (p.d + p.t) * p.r <= p.m
    return _prob(second.raw * _pt_fraction(p_t), kind="bound", in_radius=in_radius, name="success_lower")


@dataclass(frozen=True)
class FailureBounds:
    d_new: Prob
    d_fl: Prob
    d_g: Prob


def failure_bounds(p: ProbParams, p_t) -> FailureBounds:
    """Failure-probability bounds of the new decoder, the original BD-LRPC
    decoder (an estimate) and the classical LRPC decoder."""
    if p.m is None:
        raise ParameterError("m is required")
    q, m, d, t, r, nk = p.q, p.m, p.d, p.t, p.r, p.nk
    if r == 0:
        zero = _prob(Fraction(0), kind="bound")
        return FailureBounds(zero, Prob(Fraction(0), "estimate"), zero)
    pt = _pt_fraction(p_t)
    denom = _qpow(q, m) - _qpow(q, r - 1)
    d_new = 1 - (1 - _qpow(q, r * (d + t)) / denom) * pt
    d_fl = 1 - (1 - _qpow(q, -m + 2 * (d + t - 1) * r - r)) * pt
    d_g = _qpow(q, -nk + d * r) / (q - 1) + _qpow(q, r * (2 * d - 1)) / denom + _qpow(q, r * d) / denom
    return FailureBounds(
        _prob(d_new, "bound", (d + t) * r <= m and r * (d + t - 1) <= t * nk, "d_new"),
        _prob(d_fl, "estimate", (2 * (d + t) - 3) * r <= m and r * (d + t - 1) <= t * nk, "d_fl"),
        _prob(d_g, "bound", r * d <= nk, "d_g"),
    )


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class ProbReport:
    params: ProbParams
    p1: Prob
    p2_exact: Prob | DomainViolation
    p_opt: Prob | DomainViolation
    b_lower: LowerBound | DomainViolation
    b_corollary: Prob | DomainViolation
    p_upper: Prob
    K: Prob | DomainViolation
    p_t: Prob
    p_t_source: str
    success_lower: Prob | DomainViolation
    d_new: Prob | DomainViolation
    d_fl: Prob | DomainViolation
    d_g: Prob | DomainViolation
    d2_remark: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        def enc(x):
            if isinstance(x, LowerBound):
                return {**x.prob.to_dict(), "argmin_j": x.argmin_j}
            if isinstance(x, (Prob, DomainViolation)):
                return x.to_dict()
            return x

        p = self.params
        out = {"params": {"q": p.q, "m": p.m, "n": p.n, "k": p.k, "d": p.d, "t": p.t, "r": p.r, "u": p.u}}
        for name in (
            "p1", "p2_exact", "p_opt", "b_lower", "b_corollary", "p_upper", "K",
            "p_t", "success_lower", "d_new", "d_fl", "d_g",
        ):
            out[name] = enc(getattr(self, name))
        out["p_t_source"] = self.p_t_source
        if self.d2_remark:
            out["d2_remark"] = self.d2_remark
        return out

    def csv_row(self) -> dict:
        """Flat mapping of values for a CSV row (domain violations left blank)."""
        row: dict = {k: v for k, v in self.to_dict()["params"].items()}
        for name in ("p1", "p2_exact", "p_opt", "b_lower", "b_corollary", "p_upper", "K",
                     "p_t", "success_lower", "d_new", "d_fl", "d_g"):
            x = getattr(self, name)
            if isinstance(x, LowerBound):
                x = x.prob
            if isinstance(x, Prob):
                row[name] = x.value
                row[f"{name}_log10c"] = x.log10_complement
            else:
                row[name] = ""
                row[f"{name}_log10c"] = ""
        return row


def prob_report(p: ProbParams) -> ProbReport:
    q, n, k, d, t, r, u = p.q, p.n, p.k, p.d, p.t, p.r, p.u
    p_t, source = choose_pt(p)
    if d == 2:
        p2: Prob | DomainViolation = p2_exact_d2(q, n, k, r)
    else:
        p2 = DomainViolation("exact P_2 formula is for d = 2")
    p_opt = p_opt_exact(q, n, k, r) if d >= 2 else DomainViolation("d = 1 has no r(d-1) expansion")
    b_lower = p_lower_bound(q, n, k, d, r, t)
    if u > 0 and d >= 2:
        b_cor = p_corollary_bounds(q, u, t)
        K: Prob | DomainViolation = _prob(conjecture_K(q, d, r, u), kind="exact")
    else:
        b_cor = DomainViolation("needs u > 0 and d >= 2")
        K = DomainViolation("needs u > 0 and d >= 2")
    if p.m is not None:
        succ: Prob | DomainViolation = success_lower(p, p_t)
        fb = failure_bounds(p, p_t)
        d_new, d_fl, d_g = fb.d_new, fb.d_fl, fb.d_g
    else:
        succ = d_new = d_fl = d_g = DomainViolation("m not supplied")
    remark = {}
    if d == 2 and 0 < u <= r:
        remark = {
            "as_printed": d2_remark_bound(q, u, True),
            "sign_corrected": d2_remark_bound(q, u, False),
        }
    return ProbReport(
        params=p, p1=p1_classical(q, n, k, d, r), p2_exact=p2, p_opt=p_opt, b_lower=b_lower,
        b_corollary=b_cor, p_upper=p_upper_bound(q, n, k, r), K=K, p_t=p_t, p_t_source=source,
        success_lower=succ, d_new=d_new, d_fl=d_fl, d_g=d_g, d2_remark=remark,
    )


def round_half_up(x, places: int = 5) -> Decimal:
    """Round a rational to ``places`` decimals, halves away from zero."""
    x = Fraction(x)
    scale = 10**places
    scaled = x * scale
    n = math.floor(scaled + Fraction(1, 2)) if x >= 0 else -math.floor(-scaled + Fraction(1, 2))
    return Decimal(n).scaleb(-places)


def table_rows(q: int, n: int, k: int, d: int, r_values) -> list[dict]:
    """Rows of (r, P_1, B_2, P_{r(d-1)}) as exact Prob or DomainViolation values.

    For r = 0 every column is 1 (no error to recover).
    """
    rows = []
    for r in r_values:
        if r == 0:
            one = _prob(Fraction(1))
            rows.append({"r": 0, "P_1": one, "B_2": one, "P_opt": one})
            continue
        p1 = p1_classical(q, n, k, d, r)
        if d < 2:
            viol = DomainViolation("d = 1")
            rows.append({"r": r, "P_1": p1, "B_2": viol, "P_opt": viol})
            continue
        b2 = p_lower_bound(q, n, k, d, r, 2)
        rows.append({
            "r": r,
            "P_1": p1,
            "B_2": b2.prob if isinstance(b2, LowerBound) else b2,
            "P_opt": p_opt_exact(q, n, k, r),
        })
    return rows


def curve_rows(q: int, m: int, n: int, k: int, d: int, t: int, r_values) -> list[dict]:
    """Failure bounds per error rank r, using the best available P_t."""
    rows = []
    for r in r_values:
        p = ProbParams(q=q, n=n, k=k, d=d, t=t, r=r, m=m)
        p_t, source = choose_pt(p)
        fb = failure_bounds(p, p_t)
        rows.append({"r": r, "p_t": p_t, "p_t_source": source, "d_new": fb.d_new, "d_fl": fb.d_fl, "d_g": fb.d_g})
    return rows
