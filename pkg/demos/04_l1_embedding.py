"""
Embedding into a finite L1 space
================================

A vector is mapped to the table of signed weighted sums over all (sign
pattern, permutation) pairs.  The normalized L1 norm of the table is
sandwiched by the l2 permutation average (Khintchine), so the embedding
distorts the Musielak-Orlicz norm by at most a bounded factor, estimated
here over sampled directions.
"""

import numpy as np

from musielak import (
    PermutationSampler,
    WeightMatrix,
    distortion_estimate,
    functions_from_matrix,
    khintchine_sandwich_check,
    psi_image_norm,
)

rng = np.random.default_rng(11)
n = 4
a = WeightMatrix(np.sort(rng.uniform(0.05, 1, (n, n)), axis=1)[:, ::-1])
x = rng.normal(size=n)

# The embedded norm, by exhaustive enumeration of 2^n n! coordinates.
res = psi_image_norm(a, x, mode="exact")
print(f"||Psi(x)||_1 = {res.value:.8f}  ({res.samples} table entries)")

# Khintchine sandwich: (1/sqrt 2) Ave <= ||Psi(x)|| <= Ave, exactly.
rep = khintchine_sandwich_check(a, x)
print(f"sandwich: {rep.lower:.6f} <= {rep.value:.6f} <= {rep.upper:.6f}  passed = {rep.passed}")

# Distortion witness: band of ||Psi(x)|| / ||x|| over basis vectors, the
# all-ones vector, and Gaussian directions.
system = functions_from_matrix(a)
dist = distortion_estimate(system, a, PermutationSampler(0), samples=200)
print(f"ratio band [{dist.ratio_min:.4f}, {dist.ratio_max:.4f}]")
print(f"distortion upper-bound witness: {dist.distortion:.4f} over {dist.samples} directions")
