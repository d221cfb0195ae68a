import json
import warnings

import numpy as np
import pytest

from bdlrpc.code import CodeParams, sample_code, sample_codeword, sample_error, support, syndrome
from bdlrpc.decoder import (
    STAGES,
    DecodeOutcome,
    DecoderConfig,
    decode,
    erasure_decode,
    expand_syndrome_support,
    recommended_t,
    recover_support,
)
from bdlrpc.exceptions import ParameterError
from bdlrpc.field import field_make
from bdlrpc.subspace import bounded_degree, product, random_subspace, span


@pytest.fixture(scope="module")
def code_24():
    return sample_code(CodeParams(2, 24, 20, 10, 2), np.random.Generator(np.random.Philox(3)))


@pytest.fixture(scope="module")
def code_37():
    return sample_code(CodeParams(2, 37, 32, 16, 2), np.random.Generator(np.random.Philox(11)))


def test_stage_labels():
    assert STAGES == ("zero-support", "syndrome-decomposition", "erasure-system", "verification")


def test_recommended_t():
    assert recommended_t(4, 2, 32, 16) == 2
    assert recommended_t(3, 5, 32, 16) == 2
    with pytest.raises(ParameterError):
        recommended_t(16, 2, 32, 16)


def test_config_validation():
    with pytest.raises(ParameterError):
        DecoderConfig(t=0)


def test_expand(rng):
    ctx = field_make(2, 15)
    S = random_subspace(ctx, 3, rng)
    assert expand_syndrome_support(S, 1) == S
    assert expand_syndrome_support(span(ctx, []), 3).dim == 0
    for t in (2, 3, 4):
        assert expand_syndrome_support(S, t).dim <= t * S.dim


def test_recover_support_cases(rng):
    q, m, r, w = 2, 24, 2, 3
    ctx = field_make(q, m)
    F = random_subspace(ctx, 5, rng)
    assert recover_support(F, 0) == F
    done = 0
    while done < 50:
        E = random_subspace(ctx, r, rng)
        if product(bounded_degree(ctx, w + 1), E).dim != r * (w + 1):
            continue
        assert recover_support(product(bounded_degree(ctx, w), E), w - 1) == E
        done += 1


def test_erasure_roundtrip(code_24, rng):
    ctx = code_24.ctx
    for _ in range(30):
        e = sample_error(ctx, 20, 3, rng)
        s = syndrome(code_24, e)
        got = erasure_decode(code_24, support(ctx, e), s)
        assert isinstance(got, np.ndarray) and np.array_equal(got, e)


def test_erasure_zero_syndrome(code_24, rng):
    ctx = code_24.ctx
    E = random_subspace(ctx, 2, rng)
    got = erasure_decode(code_24, E, np.zeros((10, 24), dtype=int))
    assert isinstance(got, np.ndarray) and not got.any()


def test_erasure_wrong_support(code_24, rng):
    ctx = code_24.ctx
    outcomes = []
    for _ in range(100):
        e = sample_error(ctx, 20, 3, rng)
        wrong = random_subspace(ctx, 3, rng)
        outcomes.append(erasure_decode(code_24, wrong, syndrome(code_24, e)))
    rejected = sum(isinstance(o, str) for o in outcomes)
    assert rejected >= 95
    assert {o for o in outcomes if isinstance(o, str)} <= {"syndrome-decomposition", "erasure-system"}


def test_decode_codeword(code_37, rng):
    c = sample_codeword(code_37, rng)
    out = decode(code_37, c)
    assert out.success and np.array_equal(out.codeword, c) and not out.error.any()


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_decode_ranks_1_to_4(code_37, rng, r):
    ctx = code_37.ctx
    ok = 0
    for _ in range(40):
        c = sample_codeword(code_37, rng)
        e = sample_error(ctx, 32, r, rng)
        out = decode(code_37, (c + e) % 2, DecoderConfig(t=2))
        if out.success:
            assert np.array_equal(out.codeword, c) and np.array_equal(out.error, e)
            ok += 1
        else:
            assert out.stage in STAGES
    assert ok >= 38


def test_beyond_dimension_limit_fails(rng):
    # r(d+t-1) = 12 > t(n-k) = 8: the expanded syndrome support cannot fill V_{alpha,d+t-1}E
    inst = sample_code(CodeParams(2, 31, 12, 8, 3), rng)
    fails = 0
    for _ in range(40):
        c = sample_codeword(inst, rng)
        e = sample_error(inst.ctx, 12, 3, rng)
        out = decode(inst, (c + e) % 2, DecoderConfig(t=2))
        fails += not (out.success and np.array_equal(out.codeword, c))
    assert fails >= 38


def test_never_returns_unverified(code_24, rng):
    ctx = code_24.ctx
    for _ in range(100):
        y = ctx.random(rng, (20,))
        out = decode(code_24, y, DecoderConfig(t=2))
        if out.success:
            assert not syndrome(code_24, out.codeword).any()


def test_warns_without_unique_decoding(rng):
    inst = sample_code(CodeParams(2, 19, 12, 9, 2), rng, unique_decoding=False)
    with pytest.warns(UserWarning, match="unique-decoding"):
        decode(inst, np.zeros((12, 19), dtype=int))


def test_outcome_json(code_37, rng):
    ctx = code_37.ctx
    c = sample_codeword(code_37, rng)
    out = decode(code_37, (c + sample_error(ctx, 32, 2, rng)) % 2)
    doc = json.loads(out.to_json(ctx))
    assert doc["status"] == "success" and len(doc["codeword"]) == 32 and len(doc["codeword"][0]) == 37
    fail = DecodeOutcome(False, stage="erasure-system")
    assert json.loads(fail.to_json()) == {"status": "failure", "stage": "erasure-system"}


def test_decode_is_deterministic(code_24, rng):
    ctx = code_24.ctx
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        for _ in range(20):
            y = (sample_codeword(code_24, rng) + sample_error(ctx, 20, 2, rng)) % 2
            a, b = decode(code_24, y), decode(code_24, y.copy())
            assert a.success == b.success and a.stage == b.stage
            if a.success:
                assert np.array_equal(a.codeword, b.codeword)
