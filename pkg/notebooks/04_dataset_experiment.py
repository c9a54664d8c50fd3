"""
Classification data as a bandit
===============================

Each round offers one instance per class; reward is 1 for the target class.
The exact policy is tuned on the first rounds and its (beta, lambda) are
reused for the sketch. Then the sketch is compared with running the exact
policy on a PCA projection of the same size.
"""

# %%
import tempfile
from pathlib import Path

import numpy as np

from sketchbandits import DatasetSource, RunConfig, compare_pca, grid_search, ingest_csv, run
from sketchbandits.harness import OFUL_GRID

# %% [markdown]
# A local three-class mixture with the shape of a small UCI table (1473 x 9).

# %%
rng = np.random.default_rng(0)
d, sizes = 9, (629, 333, 511)
rot, _ = np.linalg.qr(rng.standard_normal((d, d)))
means = 0.7 * rng.standard_normal((3, d)) + 2.0
rows = []
for k, n in enumerate(sizes):
    X = means[k] + (rng.standard_normal((n, d)) * np.linspace(1.5, 0.3, d)) @ rot.T
    rows += [",".join(f"{v:.6f}" for v in x) + f",class{k + 1}" for x in X]
path = Path(tempfile.mkdtemp()) / "mixture.csv"
path.write_text(",".join(f"f{j}" for j in range(d)) + ",label\n" + "\n".join(rng.permutation(rows)) + "\n")

data = ingest_csv(path, "label")
print(data.n, "instances,", data.d, "features, classes", data.class_names, "sizes", data.class_sizes())

# %%
source = DatasetSource(path=str(path), label_col="label", target_class="class1")
base = RunConfig(policy="oful", env=source, radius="constant", seeds=[0, 1, 2, 3], timing=False)
grid = grid_search(base, *OFUL_GRID, validation_rounds=100)
print("tuned beta, lambda:", grid.beta, grid.lam)

# %%
tuned = RunConfig(**{**base.__dict__, "beta_mult": grid.beta, "lam": grid.lam})
exact = run(tuned).mean_series("cum_reward")[-1]
m = round(0.6 * data.d)
sketched = run(RunConfig(**{**tuned.__dict__, "policy": "soful", "m": m})).mean_series("cum_reward")[-1]
print(f"cumulative reward: OFUL {exact:.1f}, SOFUL m={m} {sketched:.1f}")

# %%
for row in compare_pca(tuned):
    t = row.table()
    print(
        f"fraction {row.fraction:.1f} (m={row.m}): OFUL on PCA {t['exact_on_pca_cum_reward'][-1]:.1f}"
        f"  SOFUL {t['sketched_cum_reward'][-1]:.1f}"
    )
