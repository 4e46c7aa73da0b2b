# %% [markdown]
# # Calibrating the O(1) envelopes
#
# Three series have a known leading term and an unspecified bounded
# remainder:
#
# - partial sums of the central binomial sequence, `A_n ~ sqrt(8/pi) sqrt(n)`,
# - the interleaving series `F(n) ~ n/4 + sqrt(n/(2 pi))`,
# - the zero-feedback column-max value `~ (2/sqrt(pi)) sqrt(n)`.
#
# This script measures the largest remainder over `n <= 5000` and writes it
# to `tests/fixtures/envelopes.json`, where the test suite reads it back as a
# regression bound.  Rerun it only when the underlying definitions change:
#
#     python demos/calibrate_envelopes.py

# %%
import json
from pathlib import Path

import numpy as np

from riffleguess.analysis import envelope_deviations

MAX_N = 5000
dev = envelope_deviations(MAX_N)

# %% [markdown]
# The remainders settle quickly; print a few checkpoints alongside the
# maxima so drift is visible at a glance.

# %%
checkpoints = [1, 10, 100, 1000, MAX_N]
fixture = {"max_n": MAX_N, "envelopes": {}, "checkpoints": {}}
for name, d in dev.items():
    fixture["envelopes"][name] = float(np.abs(d).max())
    fixture["checkpoints"][name] = {str(n): float(d[n - 1]) for n in checkpoints}
    print(f"{name:>14}: max |remainder| = {np.abs(d).max():.6f}   "
          + "  ".join(f"n={n}: {d[n - 1]:+.4f}" for n in checkpoints))

# %%
out = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "envelopes.json"
out.write_text(json.dumps(fixture, indent=2, sort_keys=True) + "\n")
print(f"wrote {out}")
