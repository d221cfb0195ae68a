"""
Decoding a BD-LRPC code
=======================

A code with parity-check entries in V_{alpha,2} over F_{2^37}, length 32 and
dimension 16. We send a random codeword, add an error of rank 4 and decode
with syndrome-support expansion t = 2.
"""

import numpy as np

from bdlrpc.code import CodeParams, sample_code, sample_codeword, sample_error, syndrome
from bdlrpc.decoder import DecoderConfig, decode

rng = np.random.Generator(np.random.Philox(2024))
code = sample_code(CodeParams(q=2, m=37, n=32, k=16, d=2), rng)
print("flags:", code.flags)

c = sample_codeword(code, rng)
e = sample_error(code.ctx, 32, 4, rng)
y = (c + e) % 2
print("syndrome of y is nonzero:", syndrome(code, y).any())

out = decode(code, y, DecoderConfig(t=2))
print("status:", out.status, "| recovered support dimension:", out.support.dim)
print("codeword recovered:", np.array_equal(out.codeword, c))

# Failures are labelled with the stage that stopped the decoder.
fails = {}
for _ in range(200):
    c = sample_codeword(code, rng)
    res = decode(code, (c + sample_error(code.ctx, 32, 6, rng)) % 2)
    if not res.success:
        fails[res.stage] = fails.get(res.stage, 0) + 1
print("failures at rank 6 over 200 words:", fails or "none")
