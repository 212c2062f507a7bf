# %% [markdown]
# # One-arm probabilities and their exponents
#
# The probability that the cluster of a point reaches distance `eps` decays
# like `eps**(-5/48)` relative to distance 1 in the bulk and like `eps**(-1/3)`
# for a boundary point of the half-plane.  One exploration per sample serves
# every radius at once.  Small meshes here; see the acceptance suite for
# the full-size run.

# %%
from critperc.experiments import arm_sweep

eps = [1 / 16, 1 / 8, 1 / 4, 1 / 2]
for kind in ("one_arm", "boundary_arm"):
    sw = arm_sweep(kind, eps, mesh=1 / 128, n=20_000, seed=1, normalize=True)
    print(kind)
    for e, est, r in zip(sw.eps, sw.estimates, sw.ratios):
        print(f"  eps={e:<7g} p={est.p_hat:.4f}  ratio to eps=1: {r.ratio:.4f} +- {r.stderr:.4f}")
    print(f"  slope {sw.fit.slope:+.4f} +- {sw.fit.stderr:.4f}   expected {sw.target:+.4f}")
