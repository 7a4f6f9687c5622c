"""
Boundary conditions versus von Neumann parameters
=================================================

Selfadjoint extensions can be labelled by the boundary unitary ``V_B`` or by
a unitary between deficiency spaces.  The two labels are related by a Moebius
map with ``c = exp(2 pi L)``.
"""

import numpy as np

from momenta import boundary_unitary as bu
from momenta import momentum_operator as mo
from momenta import selfadjoint_extensions as sa
from momenta.phase_arith import UNIT_INTERVAL

for sign in "+-":
    d = sa.deficiency_vector(sign, [1.0], UNIT_INTERVAL, 512)
    print(f"f_{sign}: residual {d.residual:.1e}, |f|^2 {d.norm_squared():.6e} vs {d.norm_identity():.6e}")

V = bu.random_unitary(3, seed=2)
W = sa.cayley_boundary_to_vn(V, UNIT_INTERVAL)
back = sa.cayley_vn_to_boundary(W, UNIT_INTERVAL)
print("round trip error:", np.max(np.abs(back.matrix - V.matrix)))

# eigenvectors are shared, eigenvalues move by the scalar map
model = bu.eigendecompose(V)
images = sa.mobius_boundary_to_vn(model.eigenvalues, UNIT_INTERVAL)
print("eigen relation:", max(np.linalg.norm(W.matrix @ model.vectors[:, j] - images[j] * model.vectors[:, j]) for j in range(model.dimension)))

#%%
# Only the right ladder of exponentials lies in dom(P_V).
S = bu.make_scalar(0.3, 0)
for lam in (0.3, 1.3, 0.5):
    f = mo.eigenfunction(lam, [1.0], UNIT_INTERVAL, 128)
    print(f"e({lam} x) in domain: {sa.domain_check(f, S)}")
