"""
An exponential basis on a quarter Cantor set
============================================

The measure splits mass evenly between base-4 digits {0, 2}.  Frequencies
built from base-4 digits {0, 1} give orthonormal exponentials.
"""

import numpy as np

from momenta import fractal_measure as fm

lam = fm.lambda_set(3)
print("Lambda at level 3:", lam.values.tolist())

# The infinite product agrees with a direct sum over level-12 intervals.
for t in (1.0, 2.0, 5.0):
    prod = fm.cantor_fourier(t)
    direct = fm.CantorLevel(12).midpoint_fourier(t)
    print(f"mu_hat({t}) product {prod:.6f}  midpoint {direct:.6f}")

for n in range(1, 7):
    print(f"level {n}: Gram defect {fm.gram_matrix(fm.lambda_set(n)).max_defect:.1e}")

#%%
# With digits {0, 3} the same frequencies are no longer orthogonal; the
# doubled set 2 Lambda is.
print("digits {0,3}, Lambda:", fm.gram_matrix(lam.values, digits=(0, 3)).max_defect)
print("digits {0,3}, 2 Lambda:", fm.gram_matrix(2 * lam.values, digits=(0, 3)).max_defect)

#%%
# Product with Lebesgue measure on [0, 1]: shift each frequency column by gamma.
gamma = np.random.default_rng(3).random(len(lam))
print("joint Gram defect:", fm.joint_gram(gamma, lam, (0, 1)).max_defect)
