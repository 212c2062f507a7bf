# %% [markdown]
# # Gasket density in a domain
#
# A point belongs to the gasket when its cluster touches the boundary.
# The density scales like the conformal radius to the power `-5/48`, so
# points with equal conformal radius in different domains look alike.

# %%
from critperc.domains import Disk, UpperHalfPlane, parse_domain
from critperc.experiments import gasket_profile

dom = Disk(0j, 1.0)

prof = gasket_profile(dom, [0j, 0.5, 0.9], mesh=1 / 64, n=20_000, seed=5)
for z in prof.points:
    print(f"z={z:.2f}  conformal radius {dom.conformal_radius(z):.3f}  p={prof.estimate(z).p_hat:.4f}")
r = prof.ratio(0.9, 0j)
print(f"p(0.9)/p(0) = {r.ratio:.4f} +- {r.stderr:.4f}, expected {prof.target(0.9, 0j):.4f}")

# %% Same conformal radius, different domain
half = gasket_profile(UpperHalfPlane(), [0.5j], mesh=1 / 64, n=20_000, seed=5, method="points")
print("half-plane at i/2:", round(half.estimate(0.5j).p_hat, 4), " disk at 0:", round(prof.estimate(0j).p_hat, 4))

# %% Domains can be written as strings
print(parse_domain("strip:1*2+0,1"))
