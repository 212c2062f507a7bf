# %% [markdown]
# # Where does the boundary cluster of the origin go?
#
# In the half-plane, the density of the cluster of the origin at `z` scales
# like `Im(z)**(11/48) * |z|**(-2/3)`.  All points are read off one
# exploration per sample, so ratios between points share their noise.

# %%
import cmath
import math

from critperc.experiments import anchored_profile, anchored_target_ratio, box_stability

top, side, inner = 0.5j, 0.5 * cmath.exp(1j * math.pi / 6), 0.25j
prof = anchored_profile([top, side, inner], mesh=1 / 64, n=50_000, seed=3)
for a, b in ((top, side), (inner, top)):
    r = prof.ratio(a, b)
    print(f"rho({a:.3f})/rho({b:.3f}) = {r.ratio:.4f} +- {r.stderr:.4f}   "
          f"expected {anchored_target_ratio(a, b):.4f}")

# %% The safety box truncates clusters; doubling it barely moves the estimate
bs = box_stability([top], mesh=1 / 64, n=20_000, seed=3)
for c in bs.checks():
    print(c.line())
