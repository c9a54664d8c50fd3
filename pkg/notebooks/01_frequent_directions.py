"""
Frequent Directions in a few lines
==================================

A sketch keeps m rows instead of the full d x d Gram matrix. Every update
drops the smallest direction and remembers how much mass it threw away.
"""

# %%
import numpy as np

from sketchbandits import fd_update, inv_apply, sketch_stream
from sketchbandits.sketch import SketchState

# %% [markdown]
# Two orthogonal rows into a sketch of size 2: the second insert fills the
# buffer, so the smallest direction gets shrunk away and rho_bar records it.

# %%
state = SketchState.empty(m=2, d=3, lam=1.0)
state = fd_update(state, np.array([1.0, 0.0, 0.0]))
print("after e1: S =\n", state.S, "\nrho_bar =", state.rho_bar)
state = fd_update(state, np.array([0.0, 1.0, 0.0]))
print("after e2: S =\n", state.S, "\nrho_bar =", state.rho_bar)

# %% [markdown]
# The sketch under-approximates X.T X by at most rho_bar in every direction.

# %%
rng = np.random.default_rng(0)
d, m, T = 30, 6, 400
X = rng.standard_normal((T, d)) * np.linspace(1.0, 0.1, d)
X /= np.linalg.norm(X, axis=1, keepdims=True)
final = list(sketch_stream(X, m, lam=1.0))[-1]
gap = np.linalg.eigvalsh(X.T @ X - final.S.T @ final.S)
print(f"eig(X.T X - S.T S) in [{gap[0]:.2e}, {gap[-1]:.3f}], rho_bar = {final.rho_bar:.3f}")

# %% [markdown]
# The regularized inverse costs O(md) through the small diagonal core.

# %%
v = rng.standard_normal(d)
dense = np.linalg.solve(final.S.T @ final.S + np.eye(d), v)
print("relative error vs dense solve:", np.linalg.norm(inv_apply(final, v) - dense) / np.linalg.norm(dense))

# %% [markdown]
# Streams that live in fewer than m dimensions are sketched exactly.

# %%
B, _ = np.linalg.qr(rng.standard_normal((d, m - 1)))
low = rng.standard_normal((T, m - 1)) @ B.T
s_low = list(sketch_stream(low, m, lam=1.0))[-1]
print("low-rank stream rho_bar:", s_low.rho_bar)
print("max |X.T X - S.T S|:", np.abs(low.T @ low - s_low.S.T @ s_low.S).max())
