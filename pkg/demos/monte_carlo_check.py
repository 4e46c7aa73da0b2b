# %% [markdown]
# # Checking the exact values by simulation
#
# Each trial's randomness is a hash of (seed, trial index), so a run gives
# the same histogram whether it uses one process or several.

# %%
from riffleguess.analysis import exact_G_ladder
from riffleguess.montecarlo import (
    SimulationConfig,
    interleave_uniformity_test,
    run_trials,
    sampler_equivalence_test,
)

# %%
for n in (2, 3, 8, 16, 52):
    r = run_trials(SimulationConfig(n, 10**6, 7))
    exact = float(exact_G_ladder(n))
    z = (r.mean_reward - exact) / r.standard_error
    print(f"n={n:2d}  simulated {r.mean_reward:.5f} +- {r.standard_error:.5f}  exact {exact:.5f}  z={z:+.2f}")

# %%
c = SimulationConfig(16, 200000, 3)
print(run_trials(c, workers=1) == run_trials(c, workers=2))

# %% [markdown]
# Dropping cards in proportion to pile size gives every interleaving of two
# fixed piles the same chance, and the cut-and-drop sampler agrees with the
# bit-label sampler.

# %%
rep = interleave_uniformity_test(3, 4, 10**5, 1)
print(rep.categories, "interleavings, chi2 =", round(rep.statistic, 2), "p =", round(rep.p_value, 3))
print("sampler equivalence p =", round(sampler_equivalence_test(4, 10**6, 2)[1], 3))
