"""
Four policies, one contract
===========================

OFUL and linear Thompson sampling, each in an exact and a sketched flavor.
All of them expose select(D) and update(x, y).
"""

# %%
import numpy as np

from sketchbandits import ConfidenceConfig, Policy, SyntheticEnvSpec, play, synth_generate

# %%
spec = SyntheticEnvSpec(d=40, K=10, rank=6, R=0.3, horizon=2000, seed=3)
stream = synth_generate(spec)
cfg = ConfidenceConfig(d=40, m=8, R=0.3, horizon=stream.T)

for kind in ("oful", "soful", "lints", "slints"):
    res = play(stream, Policy(kind, cfg, rng=np.random.default_rng(0)), timing=False)
    print(f"{kind:>7}: total regret {res.cum_regret[-1]:8.2f}  final rho_bar {res.rho_bar[-1]:.2e}")

# %% [markdown]
# The context subspace has rank 6 < m = 8, so the sketch never shrinks and
# SOFUL walks the same path as OFUL when both use the same radius.

# %%
a = play(stream, Policy("oful", cfg, beta_mult=0.5, radius="constant"), timing=False)
b = play(stream, Policy("soful", cfg, beta_mult=0.5, radius="constant"), timing=False)
print("identical actions:", np.array_equal(a.arm, b.arm))

# %% [markdown]
# With a sketch smaller than the context rank the two part ways, and rho_bar grows.

# %%
small = ConfidenceConfig(d=40, m=3, R=0.3, horizon=stream.T)
c = play(stream, Policy("soful", small, beta_mult=0.5, radius="constant"), timing=False)
print("m=3 agreement with OFUL:", np.mean(a.arm == c.arm).round(3), " rho_bar:", c.rho_bar[-1].round(2))
