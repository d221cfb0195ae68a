"""
Arithmetic in F_{q^m} and its F_q-subspaces
===========================================

Elements of F_{q^m} are coordinate vectors on the basis 1, alpha, ...,
alpha^(m-1). Subspaces are stored through a canonical echelon basis, so
equality is a plain array comparison.
"""

import numpy as np

from bdlrpc.field import field_make
from bdlrpc.subspace import bounded_degree, intersect, product, random_subspace, scalar_mul, subspace_sum

# F_8 is built on the smallest irreducible cubic, x^3 + x + 1.
ctx = field_make(2, 3)
print("modulus coefficients (constant term first):", ctx.modulus)

# alpha^4 reduces to alpha^2 + alpha.
a2 = ctx.alpha_power(2)
print("alpha^2 * alpha^2 =", ctx.format(ctx.mul(a2, a2)))

# A bigger field: the one used for the decoding experiments.
F = field_make(2, 37)
x = F.random(np.random.default_rng(1))
print("x * x^-1 == 1:", np.array_equal(F.mul(x, F.inv(x)), F.one()))

# V_{alpha,d} = <1, alpha, ..., alpha^(d-1)> and products with a random support.
rng = np.random.default_rng(2)
E = random_subspace(F, 3, rng)
V3 = bounded_degree(F, 3)
print("dim E =", E.dim, " dim V_3 E =", product(V3, E).dim)

# Sum and intersection obey the Grassmann identity.
U, W = random_subspace(F, 20, rng), random_subspace(F, 25, rng)
print("dim(U+W) + dim(U∩W) =", subspace_sum(U, W).dim + intersect(U, W).dim, "= 45")

# Multiplying by alpha^-1 and intersecting peels one power of alpha.
VE = product(V3, E)
shifted = scalar_mul(F.alpha_power(-1), VE)
print("(alpha^-1 V_3 E) ∩ V_3 E == V_2 E:", intersect(shifted, VE) == product(bounded_degree(F, 2), E))
