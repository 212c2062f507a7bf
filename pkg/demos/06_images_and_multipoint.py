# %% [markdown]
# # Mirror images and multipoint scaling
#
# The anchored event in the upper half-plane and its mirror in the lower
# half-plane use disjoint sites, so they are independent and equally
# likely.  Connecting a bulk point to several boundary points picks up one
# factor `s**(-5/48)` per bulk point and `s**(-1/3)` per boundary point
# when everything is scaled by `s`.

# %%
from critperc.experiments import images_check, multipoint_covariance

rep = images_check(1j, mesh=1 / 32, n=50_000, seed=9)
for c in rep.checks():
    print(c.line())

# %%
mp = multipoint_covariance([0.25j], [-0.125, 0.125], s=2.0, mesh=1 / 64, n=50_000, seed=9)
print(f"scaled/original = {mp.ratio.ratio:.4f} +- {mp.ratio.stderr:.4f}, expected {mp.target:.4f}")
