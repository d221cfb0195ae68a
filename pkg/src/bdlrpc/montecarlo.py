"""Seeded Monte Carlo estimators.

* ``estimate_pt``: rank of the block-Toeplitz matrix M_t with uniform blocks.
* ``estimate_qt``: rank of (Z; ZA; ...; ZA^(t-1)) with A in block companion form.
* ``simulate_decoding``: end-to-end decoding of random rank-r errors.

Randomness comes from Philox generators keyed by (seed, spawn key). The rank
estimators draw in fixed-size chunks keyed by chunk index; the decoding
simulation keys every trial by its index. Either way the result does not
depend on the number of workers.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from bdlrpc.code import CodeInstance, CodeParams, sample_code, sample_codeword, sample_error
from bdlrpc.decoder import DecoderConfig, decode
from bdlrpc.exceptions import ParameterError
from bdlrpc.linalg import batch_rank
from bdlrpc.probability import ProbParams
from bdlrpc.subspace import bounded_degree, product, span

__all__ = [
    "TrialStats",
    "wilson_interval",
    "make_rng",
    "assemble_mt",
    "assemble_mtza",
    "companion_matrix",
    "estimate_pt",
    "estimate_qt",
    "simulate_decoding",
    "CSV_COLUMNS",
]

CHUNK = 20_000

CSV_COLUMNS = [
    "q", "m", "n", "k", "d", "t", "r", "trials", "successes", "rate", "ci_lo", "ci_hi",
    "fail_zero_support", "fail_syndrome_decomp", "fail_erasure", "fail_verify", "seed",
    "fail_miscorrect",
]

_STAGE_COLUMNS = {
    "zero-support": "fail_zero_support",
    "syndrome-decomposition": "fail_syndrome_decomp",
    "erasure-system": "fail_erasure",
    "verification": "fail_verify",
    "miscorrection": "fail_miscorrect",
}


def make_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return lo, hi


@dataclass
class TrialStats:
    trials: int
    successes: int
    seed: int
    params: dict
    failures: dict[str, int] = field(default_factory=dict)
    diagnostics: dict[str, int] = field(default_factory=dict)
    note: str = ""

    @property
    def estimate(self) -> float:
        return self.successes / self.trials if self.trials else float("nan")

    def interval(self, z: float = 1.96) -> tuple[float, float]:
        """Wilson score interval; the default z gives 95% coverage."""
        return wilson_interval(self.successes, self.trials, z)

    @property
    def sigma(self) -> float:
        """Half-width of the z=1 Wilson interval."""
        lo, hi = self.interval(1.0)
        return (hi - lo) / 2

    def agrees_with(self, value: float, z: float = 3.0) -> bool:
        lo, hi = self.interval(z)
        return lo <= value <= hi

    def merge(self, other: TrialStats) -> TrialStats:
        failures = dict(self.failures)
        for k, v in other.failures.items():
            failures[k] = failures.get(k, 0) + v
        diag = dict(self.diagnostics)
        for k, v in other.diagnostics.items():
            diag[k] = diag.get(k, 0) + v
        return TrialStats(self.trials + other.trials, self.successes + other.successes, self.seed,
                          self.params, failures, diag, self.note)

    def to_dict(self) -> dict:
        lo, hi = self.interval()
        return {
            "params": self.params,
            "trials": self.trials,
            "successes": self.successes,
            "rate": self.estimate,
            "ci95": [lo, hi],
            "failures": self.failures,
            "diagnostics": self.diagnostics,
            "seed": self.seed,
            "note": self.note,
        }

    def csv_row(self) -> dict:
        lo, hi = self.interval()
        row = {c: self.params.get(c, "") for c in ("q", "m", "n", "k", "d", "t", "r")}
        row.update(trials=self.trials, successes=self.successes, rate=self.estimate, ci_lo=lo, ci_hi=hi, seed=self.seed)
        for stage, col in _STAGE_COLUMNS.items():
            row[col] = self.failures.get(stage, 0)
        return {c: row[c] for c in CSV_COLUMNS}

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        if header:
            w.writeheader()
        w.writerow(self.csv_row())
        return buf.getvalue()


def _params_dict(p: ProbParams) -> dict:
    return {"q": p.q, "m": p.m, "n": p.n, "k": p.k, "d": p.d, "t": p.t, "r": p.r}


# ---------------------------------------------------------------------------
# rank experiments


def assemble_mt(X: np.ndarray, t: int) -> np.ndarray:
    """Block-Toeplitz M_t from blocks X of shape (..., d, n-k, r).

    Block row i holds X_1, ..., X_d starting at block column i.
    """
    *lead, d, nk, r = X.shape
    M = np.zeros((*lead, t * nk, r * (d + t - 1)), dtype=X.dtype)
    for i in range(t):
        for j in range(d):
            M[..., i * nk:(i + 1) * nk, (i + j) * r:(i + j + 1) * r] = X[..., j, :, :]
    return M


def companion_matrix(blocks: np.ndarray) -> np.ndarray:
    """Block companion matrix with top block row A_1..A_{d-1}, identities below.

    ``blocks`` has shape (..., d-1, r, r).
    """
    *lead, dm1, r, _ = blocks.shape
    n = dm1 * r
    A = np.zeros((*lead, n, n), dtype=blocks.dtype)
    for j in range(dm1):
        A[..., :r, j * r:(j + 1) * r] = blocks[..., j, :, :]
    for j in range(1, dm1):
        A[..., j * r:(j + 1) * r, (j - 1) * r:j * r] = np.eye(r, dtype=blocks.dtype)
    return A


def assemble_mtza(Z: np.ndarray, A: np.ndarray, t: int, q: int) -> np.ndarray:
    """(Z; ZA; ...; ZA^(t-1)) for batches of Z (..., u, c) and A (..., c, c)."""
    parts = [Z % q]
    for _ in range(t - 1):
        parts.append(parts[-1] @ A % q)
    return np.concatenate(parts, axis=-2)


def _chunks(trials: int):
    start, idx = 0, 0
    while start < trials:
        size = min(CHUNK, trials - start)
        yield idx, size
        start += size
        idx += 1


def _pt_chunk(args) -> int:
    q, nk, d, t, r, seed, idx, size = args
    rng = make_rng(seed, 0, idx)
    X = rng.integers(0, q, size=(size, d, nk, r), dtype=np.int64)
    ranks = batch_rank(assemble_mt(X, t), q)
    return int(np.count_nonzero(ranks == r * (d + t - 1)))


def _qt_chunk(args) -> int:
    q, u, d, t, r, seed, idx, size = args
    rng = make_rng(seed, 0, idx)
    c = r * (d - 1)
    Z = rng.integers(0, q, size=(size, u, c), dtype=np.int64)
    A = companion_matrix(rng.integers(0, q, size=(size, d - 1, r, r), dtype=np.int64))
    ranks = batch_rank(assemble_mtza(Z, A, t, q), q)
    return int(np.count_nonzero(ranks == c))


def _map(fn, jobs, workers: int):
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, jobs))


def estimate_pt(p: ProbParams, trials: int, seed: int, workers: int = 1) -> TrialStats:
    """Fraction of draws of X_1..X_d for which rank(M_t) = r(d+t-1)."""
    if trials < 1:
        raise ParameterError("trials must be positive")
    note = ""
    if p.r * (p.d + p.t - 1) > p.t * p.nk:
        note = "r(d+t-1) > t(n-k): full column rank impossible"
    if p.r == 0:
        return TrialStats(trials, trials, seed, _params_dict(p), note="r=0")
    jobs = [(p.q, p.nk, p.d, p.t, p.r, seed, idx, size) for idx, size in _chunks(trials)]
    hits = sum(_map(_pt_chunk, jobs, workers))
    return TrialStats(trials, hits, seed, _params_dict(p), note=note)


def estimate_qt(p: ProbParams, trials: int, seed: int, workers: int = 1) -> TrialStats:
    """Fraction of draws of (Z, A) for which (Z; ZA; ...; ZA^(t-1)) has rank r(d-1).

    For d = 1 the matrix is empty and Q is 1 by convention.
    """
    if trials < 1:
        raise ParameterError("trials must be positive")
    if p.d == 1 or p.r == 0:
        return TrialStats(trials, trials, seed, _params_dict(p), note="degenerate: Q = 1")
    if p.u <= 0:
        return TrialStats(trials, 0, seed, _params_dict(p), note="u <= 0")
    jobs = [(p.q, p.u, p.d, p.t, p.r, seed, idx, size) for idx, size in _chunks(trials)]
    hits = sum(_map(_qt_chunk, jobs, workers))
    return TrialStats(trials, hits, seed, _params_dict(p))


# ---------------------------------------------------------------------------
# decoding simulation


def check_radius(p: ProbParams) -> list[str]:
    problems = []
    if p.m is not None and (p.d + p.t) * p.r > p.m:
        problems.append(f"(d+t)r = {(p.d + p.t) * p.r} exceeds m = {p.m}")
    if p.r * (p.d + p.t - 1) > p.t * p.nk:
        problems.append(f"r(d+t-1) = {p.r * (p.d + p.t - 1)} exceeds t(n-k) = {p.t * p.nk}")
    return problems


def _trial(code: CodeInstance, p: ProbParams, rng: np.random.Generator, diagnose: bool) -> tuple[str, dict]:
    ctx = code.ctx
    c = sample_codeword(code, rng)
    e = sample_error(ctx, p.n, p.r, rng)
    y = (c + e) % ctx.q
    out = decode(code, y, DecoderConfig(t=p.t))
    if out.success:
        result = "success" if np.array_equal(out.codeword, c) else "miscorrection"
    else:
        result = out.stage
    diag: dict[str, int] = {}
    if diagnose and p.r > 0:
        E = span(ctx, e)
        s = (y.reshape(-1) @ code._syndrome_map % ctx.q).reshape(p.nk, ctx.m)
        expanded = product(bounded_degree(ctx, p.t), span(ctx, s))
        target = product(bounded_degree(ctx, p.d + p.t - 1), E)
        cond_i = expanded == target
        cond_ii = product(bounded_degree(ctx, min(p.d + p.t, ctx.m)), E).dim == (p.d + p.t) * p.r
        diag = {
            "cond_i": int(cond_i),
            "cond_ii": int(cond_ii),
            "cond_both": int(cond_i and cond_ii),
            "cond_both_success": int(cond_i and cond_ii and result == "success"),
        }
    return result, diag


def _sim_chunk(args) -> TrialStats:
    code, p, seed, indices, diagnose, resample = args
    stats = TrialStats(0, 0, seed, _params_dict(p))
    for i in indices:
        rng = make_rng(seed, 1, i)
        inst = _sample_code(p, rng) if resample else code
        result, diag = _trial(inst, p, rng, diagnose)
        failures = {} if result == "success" else {result: 1}
        stats = stats.merge(TrialStats(1, int(result == "success"), seed, stats.params, failures, diag))
    return stats


def _sample_code(p: ProbParams, rng: np.random.Generator) -> CodeInstance:
    return sample_code(CodeParams(p.q, p.m, p.n, p.k, p.d), rng, maximal_row_span=True,
                       unique_decoding=CodeParams(p.q, p.m, p.n, p.k, p.d).unique_decoding_possible)


def simulate_decoding(
    p: ProbParams,
    trials: int,
    seed: int,
    workers: int = 1,
    *,
    code: CodeInstance | None = None,
    resample_code: bool = False,
    diagnose: bool = False,
    force: bool = False,
) -> TrialStats:
    """Decode ``trials`` random words c + e with rank(e) = r.

    One code is sampled per run (seeded by ``seed``) unless ``code`` is given
    or ``resample_code`` draws a fresh code for every trial. A trial succeeds
    when the decoder returns the transmitted codeword. With ``diagnose`` the
    two sufficient conditions for correct decoding are evaluated per trial
    against the planted error and tallied in ``diagnostics``.
    """
    if p.m is None:
        raise ParameterError("simulate_decoding needs m")
    if trials < 1:
        raise ParameterError("trials must be positive")
    problems = check_radius(p)
    if problems and not force:
        raise ParameterError("parameters outside the decoding radius: " + "; ".join(problems) + " (use force)")
    if code is None and not resample_code:
        code = _sample_code(p, make_rng(seed, 0))
    if code is not None:
        cp = code.params
        if (cp.q, cp.m, cp.n, cp.k, cp.d) != (p.q, p.m, p.n, p.k, p.d):
            raise ParameterError("code parameters do not match the simulation parameters")
    nchunks = max(1, min(workers, trials)) if workers > 1 else 1
    bounds = np.linspace(0, trials, nchunks + 1).astype(int)
    jobs = [(code, p, seed, range(bounds[i], bounds[i + 1]), diagnose, resample_code) for i in range(nchunks)]
    parts = _map(_sim_chunk, jobs, workers)
    total = TrialStats(0, 0, seed, _params_dict(p))
    for part in parts:
        total = total.merge(part)
    if problems:
        total.note = "forced outside radius: " + "; ".join(problems)
    return total
