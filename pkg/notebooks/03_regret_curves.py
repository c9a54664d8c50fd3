"""
Regret curves from the harness
==============================

Multi-seed runs write per-seed CSVs, an averaged series and a JSON summary.
"""

# %%
import tempfile
from pathlib import Path

import numpy as np

from sketchbandits import RunConfig, SyntheticEnvSpec, run

# %%
out = Path(tempfile.mkdtemp())
env = SyntheticEnvSpec(d=20, K=10, rank=5, R=0.3, horizon=5000)
result = run(RunConfig(policy="soful", env=env, m=8, seeds=[0, 1, 2, 3], out=str(out), timing=False))
print(sorted(p.name for p in out.iterdir()))

# %% [markdown]
# Sublinear regret shows up as a log-log slope well below one.

# %%
cum = result.mean_series("cum_regret")
t = np.arange(1, cum.size + 1)
w = t >= 500
slope = np.polyfit(np.log(t[w]), np.log(cum[w]), 1)[0]
print(f"mean cumulative regret at T: {cum[-1]:.2f}, log-log slope on [500, 5000]: {slope:.3f}")
for checkpoint in (100, 500, 1000, 2000, 5000):
    print(f"  t={checkpoint:5d}  R_t={cum[checkpoint - 1]:.3f}")
