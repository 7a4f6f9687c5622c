"""
Two resolvents and Stone's formula
==================================

``(z - P_V)^-1`` is computed once from the explicit Green's function and once
from the eigenfunction expansion; Stone's formula then recovers a spectral
projection from resolvent differences.
"""

import numpy as np

from momenta import boundary_unitary as bu
from momenta import momentum_operator as mo
from momenta.phase_arith import UNIT_INTERVAL

V = bu.random_unitary(2, seed=11)
model = bu.eigendecompose(V)
f = mo.band_limited_function(model, UNIT_INTERVAL, 512, 6, seed=1)

for z in (1j, 0.5 + 0.1j, -1 + 0.25j):
    g = mo.resolvent_greens(z, V, f)
    s = mo.resolvent_spectral(z, model, f, m_bound=64)
    print(f"z = {z}: relative difference {(g - s).norm() / s.norm():.2e}")

#%%
# The jump of the kernel across x = s is built into the branch coefficients.
c1, c2 = mo.greens_branch_coefficients(0.3 + 0.2j, V, UNIT_INTERVAL)
print("c2 - c1 = -i 2 pi:", np.allclose(c2 - c1, -2j * np.pi * np.eye(V.dimension)))

#%%
# Stone's formula at finite b smears each spectral point into a Lorentzian
# of width b, so the error against the exact projection shrinks with b.
D = bu.make_diagonal([0.25, 0.7, 0.25], 1)
dm = bu.eigendecompose(D)
h = mo.band_limited_function(dm, UNIT_INTERVAL, 128, 4, seed=5)
exact = mo.spectral_projection(-0.5, 0.5, dm, UNIT_INTERVAL).apply(h)
for b in (1e-1, 1e-2, 1e-3):
    approx, info = mo.stone_projection(-0.5, 0.5, D, b, h, full_output=True)
    err = (approx - exact).norm() / h.norm()
    print(f"b = {b:g}: error {err:.2e}, panels {info['panels']}, converged {info['converged']}")
