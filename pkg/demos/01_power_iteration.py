"""
Power iteration and one deflation step
======================================

The solver's job, done numerically: find the dominant singular triplet of a
small nonnegative matrix, subtract it, clamp at zero.
"""
import numpy as np

from agentic_deflation import deflate_step, frobenius_norm, reconstruct, top_singular_triplet

rng = np.random.default_rng(0)

# a rank-2 nonnegative matrix plus a little noise
u1, v1 = rng.random(6), rng.random(5)
u2, v2 = rng.random(6), rng.random(5)
a = 200 * np.outer(u1, v1) + 60 * np.outer(u2, v2) + rng.random((6, 5))
print(np.round(a, 1))

# power iteration on the 5x5 Gram matrix
t = top_singular_triplet(a)
print("s =", t.s, "converged:", t.converged)
print("numpy's top singular value:", np.linalg.svd(a, compute_uv=False)[0])

# u and v come back with a sign convention: largest |u| entry positive
print("u =", np.round(t.u, 4))
print("v =", np.round(t.v, 4))

# A := max(0, A - s u v^T)
r = deflate_step(a, t)
print("norm before", frobenius_norm(a), "after", frobenius_norm(r))
print("entries clamped:", int(np.sum(a - reconstruct(t) < 0)))
