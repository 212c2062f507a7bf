# %% [markdown]
# # Exploring one cluster
#
# `explore` grows the open cluster of a start site inside a region and
# reports whether it left the region, which target sites it reached, and
# how many sites it visited.

# %%
from critperc.explorer import UPPER, disk, explore
from critperc.lattice import ORIGIN, LatticeGeometry
from critperc.randomness import SampleKey

g = LatticeGeometry(1 / 16)
for s in range(6):
    r = explore(SampleKey(7, s), ORIGIN, disk(0j, 0.5), targets=[(0, 8)], g=g, universe=UPPER)
    print(f"sample {s}: escaped={r.escaped!s:5} reached (0,8)={bool(r.targets_hit)!s:5} "
          f"visited={r.visited_count}")

# %% [markdown]
# Forcing sites open or closed is handy for checking detectors by hand.

# %%
r = explore(SampleKey(0, 0), ORIGIN, disk(0j, 0.25), g=g, forced=True)
print("everything open:", r.escaped, r.visited_count)
r = explore(SampleKey(0, 0), ORIGIN, disk(0j, 0.25), g=g, forced={ORIGIN: False})
print("start closed:", r.escaped, r.visited_count)
