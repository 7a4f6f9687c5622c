"""
Spectrum and unitary group of a twisted momentum operator
=========================================================

A boundary unitary ``V`` on the Fourier modes ``|n| <= N`` selects the
extension ``P_V`` of ``(1 / i 2 pi) d/dx`` with ``f(beta) = V f(alpha)``.
"""

import numpy as np

from momenta import boundary_unitary as bu
from momenta import momentum_operator as mo
from momenta.phase_arith import UNIT_INTERVAL, IntervalConfig

# Translation by r = 1/3 acts diagonally, e_n -> e(n/3) e_n.
V = bu.make_rotation(1 / 3, 2)
model = bu.eigendecompose(V)
print("eigenphases of V:", np.round(model.phases, 12))

# Each eigenphase lam_j spawns a ladder (lam_j + m) / L.
spec = mo.spectrum(model, UNIT_INTERVAL, -1, 1)
for value, mult, band in spec.rows():
    print(f"  band {band:+d}  value {value: .6f}  multiplicity {mult}")

#%%
# The group e(a P_V) shifts samples and picks up a power of V each time a
# point wraps past beta.  One full period is just V applied pointwise.
f = mo.band_limited_function(model, UNIT_INTERVAL, 64, 3, seed=0)
one_period = mo.evolve(1.0, V, f)
print("period identity error:", np.max(np.abs(one_period.values - f.values @ V.matrix.T)))

a, b = 5 * f.step, 17 * f.step
lhs = mo.evolve(a, V, mo.evolve(b, V, f))
print("group law error:", np.max(np.abs(lhs.values - mo.evolve(a + b, V, f).values)))
print("norm change:", abs(lhs.norm() - f.norm()))

#%%
# On a longer interval the ladder spacing shrinks to 1 / L.
interval = IntervalConfig(0.0, 2.0)
S = bu.make_scalar(0.3, 0)
spec2 = mo.spectrum(bu.eigendecompose(S), interval, -1, 1)
print("L = 2 spectrum:", spec2.values)
eig = mo.eigenfunction(spec2.values[1], [1.0], interval, 256, S)
print("eigenfunction residual:", mo.momentum_residual(eig, spec2.values[1], bu.eigendecompose(S)))

#%%
# Reflection g(y) -> g(1 - y) and translation by 1/2 have the same
# eigenphase multiset when N is even, so the operators are equivalent.
for N in (2, 3):
    same = bu.are_unitarily_equivalent(bu.make_reflection(N), bu.make_rotation(0.5, N))
    print(f"N={N}: reflection ~ half translation: {same}")
