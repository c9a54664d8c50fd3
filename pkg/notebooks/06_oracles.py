"""
Brute-force oracles
===================

Each checker rebuilds its left-hand side with dense d x d algebra and
reports the tightest slack it saw.
"""

# %%
import numpy as np

from sketchbandits import (
    ConfidenceConfig,
    Policy,
    SyntheticEnvSpec,
    check_det_trace,
    check_fd_sandwich,
    check_leverage,
    check_prop_ve,
    coverage_mc,
    play,
    synth_generate,
)

# %%
stream = synth_generate(SyntheticEnvSpec(d=16, rank=16, R=0.2, horizon=400, seed=1))
cfg = ConfidenceConfig(d=16, m=5, R=0.2, horizon=400)
res = play(stream, Policy("soful", cfg), timing=False)

for report in (
    check_fd_sandwich(res.actions, cfg.m, cfg.lam),
    check_prop_ve(res.actions, cfg.m, cfg.lam),
    check_leverage(res.actions, res.quad_norm, cfg),
    check_det_trace(res.actions, cfg),
):
    print(report)

# %% [markdown]
# The literal minimum-over-k reading of the spectral error can sit below a
# valid sketch's rho_bar. Two orthogonal rows with m = 2 show it: the
# literal reading gives 0 while rho_bar / lam is 1.

# %%
rep = check_prop_ve(np.eye(3)[:2], m=2)
print({k: rep.details[k] for k in ("rho_bar_over_lambda", "eps_tail", "eps_literal", "literal_holds")})

# %% [markdown]
# Coverage of the sketched confidence ellipsoid, with a shrunken-radius control.

# %%
cov_cfg = ConfidenceConfig(d=10, m=4, R=0.5, delta=0.1, horizon=300)
env = SyntheticEnvSpec(d=10, rank=3, R=0.5)
print("coverage:", coverage_mc(cov_cfg, env, runs=50).rate)
print("control at 0.01 radius:", coverage_mc(cov_cfg, env, runs=50, radius_scale=0.01).rate)
