# %% [markdown]
# # Exact answers on tiny patches
#
# On a handful of sites every configuration can be enumerated.  The
# enumeration shares no code with the exploration kernel, so agreement
# is a strong end-to-end check of the sampler.

# %%
from critperc.oracle import check_patch, exact_probability, standard_patches

for p in standard_patches():
    chk = check_patch(p, n=100_000, seed=11)
    print(f"{p.name:32} exact {exact_probability(p)!s:>22} = {chk.exact:.5f}   "
          f"MC {chk.p_hat:.5f}  z {chk.z:+.2f}")

# %% And the detector implications hold sample by sample
from critperc.invariants import audit

for line in audit(n=2000, seed=11):
    print(line.line())
