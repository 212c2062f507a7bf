# %% [markdown]
# # Sites, neighbors and the lazy random field
#
# Sites are integer pairs `(i, j)` sitting at `mesh * (i + j/2, j*sqrt(3)/2)`.
# Whether a site is open depends only on `(seed, sample, i, j)`, so nothing
# is ever stored and any sample can be regenerated on its own.

# %%
import numpy as np

from critperc.lattice import Half, LatticeGeometry, nearest_site, neighbors, position, reflect_lower
from critperc.randomness import SampleKey, site_state, site_states

g = LatticeGeometry(1 / 8)
c = nearest_site(0.3 + 0.4j, g, Half.UPPER)
print("nearest upper site to 0.3+0.4i:", c, "at", position(c, g))
print("its six neighbors:", neighbors(c))
print("mirror image in the lower half-plane:", reflect_lower(c))

# %%
key = SampleKey(seed=42, sample=0)
print("state of", c, "in sample 0:", site_state(key, c))
print("same question again:", site_state(key, c))

# %% Open fraction over a block of sites and samples
i, j = np.meshgrid(np.arange(-50, 50), np.arange(0, 100))
states = site_states(42, np.arange(20)[:, None], i.ravel(), j.ravel())
print(f"open fraction over {states.size} site-samples: {states.mean():.4f}")

# %% A small picture of one configuration (o = open)
for jj in range(7, -1, -1):
    row = "".join("o" if site_state(key, (ii, jj)) else "." for ii in range(-12, 12))
    print(" " * jj + " ".join(row))
