# %% [markdown]
# # How the optimal score grows
#
# The exact expected score G(n) comes from a short recursion that steps
# through the consecutive phase one card at a time, feeding in the average
# value of the interleaving phase.  Rational arithmetic is exact up to a
# couple of hundred cards; the float version runs to ten thousand in well
# under a second.

# %%
import numpy as np

from riffleguess.analysis import (
    G_float_table,
    approx_G_table,
    asymptotic_target,
    exact_G_ladder,
    interleave_table,
)

# %%
f = interleave_table(6)
for a in range(4):
    print("  ".join(str(f(a, b)).rjust(6) for b in range(4)))

# %%
for n in (1, 2, 3, 4, 10):
    print(n, exact_G_ladder(n))

# %% [markdown]
# Compare with n/2 + sqrt(2n/pi).  The gap is not small at the start: it
# is already -0.507 at n = 3, reaches -0.706 at n = 8, and then drifts back
# towards about -0.506.  It stays negative throughout.

# %%
N = 10000
G = G_float_table(N)
n = np.arange(1, N + 1)
err = G[1:] - asymptotic_target(n)
for k in (1, 2, 3, 8, 20, 100, 1000, 10000):
    print(f"n={k:5d}  G={G[k]:.6f}  error={err[k - 1]:+.6f}")
print("worst", np.abs(err).max(), "at n =", int(np.abs(err).argmax()) + 1)

# %% [markdown]
# Replacing the exact value of the rest of the deck by the simpler
# recursion G~ barely moves the result once n is moderate.

# %%
Gt = approx_G_table(N)
print("max |G - G~| for n >= 20:", np.abs(G[20:] - Gt[20:]).max())
