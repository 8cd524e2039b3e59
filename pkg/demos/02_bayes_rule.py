"""
The complex Bayes rule
======================

Outcome probabilities of a third measurement predicted from a joint
distribution in two other bases, and a change of representation.
"""

import numpy as np

import weakprob as wp

rho = wp.random_density(4, 4, seed=7)
A, B, M = (wp.haar_random_basis(4, s, name=n) for s, n in [(1, "A"), (2, "B"), (3, "M")])

# %%
# Conditional weak values p(m|a,b); each (a, b) column sums to one over m
K = wp.conditional_kernel(A, B, M)
print("kernel completeness error:", K.completeness_error())

# %%
# Summing the kernel against the joint distribution gives Born probabilities
kd = wp.kd_distribution(rho, A, B)
predicted = wp.predict_probabilities(kd, K)
print("predicted:", np.round(predicted, 6))
print("Born     :", np.round(wp.born_probabilities(rho, M), 6))

# %%
# Trade B for M: the joint (A, M) distribution, and back again
am = wp.transform_representation(kd, K)
print("matches direct (A, M):", np.allclose(am.values, wp.kd_distribution(rho, A, M).values))
back = wp.invert_transform(am, A, M, B)
print("roundtrip error:", np.max(np.abs(back.values - kd.values)))
