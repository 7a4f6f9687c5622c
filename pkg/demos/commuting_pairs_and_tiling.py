"""
Commuting pairs on the square and the tiling they induce
========================================================

Two boundary unitaries ``U`` (for ``x``) and ``V`` (for ``y``) give commuting
momenta exactly when one is scalar and the other diagonal in the matching
basis.  The joint spectrum is then a column-shifted lattice.
"""

from momenta import boundary_unitary as bu
from momenta import commuting_pairs as cp

spec = cp.check_commuting_square(bu.make_scalar(0.3, 2), bu.make_rotation(0.25, 2))
print("case:", spec.case_tag.value, "alpha:", spec.alpha)
print("betas:", spec.beta_list)
print("geometric r:", cp.detect_geometric(spec))

print("two rotations commute?", cp.check_commuting_square(bu.make_rotation(1 / 3, 2), bu.make_rotation(0.5, 2)))

#%%
# Columns of unit squares, each shifted up by beta_m, cover the plane once.
window = (0.25, 3.75, 0.25, 3.75)
m_range, n_range = cp.generation_ranges(window)
for r in (0.0, 0.5, 1 / 3):
    js = cp.joint_spectrum_square(cp.geometric_spec(r, m_range), m_range, n_range)
    report = cp.tiling_check(js, window)
    print(f"r = {r:.4f}: tiling {report.is_tiling}, covers {report.min_cover}..{report.max_cover}")

js = cp.joint_spectrum_square(cp.geometric_spec(0.5, m_range), m_range, n_range)
holed = cp.tiling_check(js.without((1.0, 1.5)), window, resolution=16)
print("with one point removed:", holed.to_dict(max_violations=2))
