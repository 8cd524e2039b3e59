"""
Kirkwood-Dirac distributions and state reconstruction
=====================================================

A qubit state seen through two non-commuting bases, then recovered from
its joint quasiprobability alone.
"""

import numpy as np

import weakprob as wp

R = 1 / np.sqrt(2)
Z = wp.validate_basis([[1, 0], [0, 1]], ["0", "1"], name="Z")
Y = wp.validate_basis([[R, 1j * R], [R, -1j * R]], ["+i", "-i"], name="Y")

# a mixed state with coherences
rho = wp.DensityOperator([[0.7, 0.2 - 0.1j], [0.2 + 0.1j, 0.3]])

# %%
# The joint distribution has complex entries that still sum to one
kd = wp.kd_distribution(rho, Z, Y)
print(np.round(kd.values, 4))
print("total:", kd.total)

# %%
# Both marginals are ordinary Born probabilities
pz, py = wp.marginals(kd)
print("P(Z):", pz, " P(Y):", py)

# %%
# The distribution is a complete description: invert it
back = wp.reconstruct_density(kd, Z, Y)
print("reconstruction error:", np.linalg.norm(back.matrix - rho.matrix))

# %%
# In higher dimension with Haar-random bases it works the same way
rho5 = wp.random_density(5, 2, seed=1)
A, B = wp.haar_random_basis(5, 2, name="A"), wp.haar_random_basis(5, 3, name="B")
kd5 = wp.kd_distribution(rho5, A, B)
print("negative real parts:", int(np.sum(kd5.values.real < 0)), "of", kd5.values.size)
print("d=5 reconstruction error:", np.linalg.norm(wp.reconstruct_density(kd5, A, B).matrix - rho5.matrix))
