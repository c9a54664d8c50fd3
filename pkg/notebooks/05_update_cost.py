"""
Per-update cost: d^2 against m d
================================
"""

# %%
from sketchbandits import bench_scaling

rows = bench_scaling(ds=(256, 512, 1024), m=16, rounds=200)
print(f"{'d':>6} {'exact us':>10} {'sketched us':>12} {'exact x':>8} {'sketch x':>9}")
for r in rows:
    print(
        f"{r['d']:>6} {r['exact_mom_ns'] / 1e3:>10.0f} {r['sketched_mom_ns'] / 1e3:>12.0f}"
        f" {r.get('exact_ratio', float('nan')):>8.2f} {r.get('sketched_ratio', float('nan')):>9.2f}"
    )

# %% [markdown]
# Doubling d roughly quadruples the dense Sherman-Morrison step and roughly
# doubles the sketched one.
