"""Acceptance criteria, each at its stated tolerance.

Every criterion is a plain function returning ``(ok, detail)``; the tests
assert ``ok`` and record one PASS/FAIL line that pytest prints in its
terminal summary. ``python tests/test_acceptance.py`` runs them directly.
"""

import time

import numpy as np
import pytest
from conftest import random_stream, record_acceptance

from sketchbandits.confidence import ConfidenceConfig
from sketchbandits.environments import SyntheticEnvSpec
from sketchbandits.harness import OFUL_GRID, DatasetSource, RunConfig, bench_scaling, grid_search, play, run
from sketchbandits.oracle import check_det_trace, check_leverage, coverage_mc
from sketchbandits.policies import Policy
from sketchbandits.sketch import InvSqrtMode, inv_apply, inv_sqrt_apply, sketch_stream


def _random_streams(n=100, seed=2024, d_max=64, m_max=16, T_max=200, T_min=1):
    """``(contexts, m, lam)`` triples with mixed ranks, scales and regularizers."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        d = int(rng.integers(2, d_max + 1))
        m = int(rng.integers(1, min(m_max, d) + 1))
        T = int(rng.integers(T_min, T_max + 1))
        rank = int(rng.integers(1, d + 1)) if rng.random() < 0.5 else None
        X = random_stream(rng, T, d, rank=rank) * rng.uniform(0.05, 3.0, size=(T, 1))
        out.append((X, m, float(10 ** rng.uniform(-2, 1))))
    return out


def _rel(a, b):
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300))


def criterion_1():
    start = time.perf_counter()
    rng = np.random.default_rng(1)
    worst = 0.0
    for X, m, lam in _random_streams():
        d = X.shape[1]
        for state in sketch_stream(X, m, lam):
            S = state.S
            v = rng.standard_normal(d)
            dense = np.linalg.solve(S.T @ S + lam * np.eye(d), v)
            worst = max(worst, _rel(inv_apply(state, v), dense))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-8 and elapsed < 30
    return ok, f"max rel err {worst:.2e} <= 1e-8, {elapsed:.1f}s < 30s"


def criterion_2():
    worst = np.inf
    for X, m, lam in _random_streams():
        d = X.shape[1]
        G = np.zeros((d, d))
        for t, state in enumerate(sketch_stream(X, m, lam)):
            if t:
                G += np.outer(X[t - 1], X[t - 1])
            S = state.S
            ev = np.linalg.eigvalsh(G - S.T @ S)
            tol = 1e-8 * np.trace(G)
            margin = min(ev[0] + tol, state.rho_bar + tol - ev[-1])
            worst = min(worst, margin)
    E = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    final = list(sketch_stream(E, 2, 1.0))[-1]
    diff = E.T @ E - final.S.T @ final.S
    exact = bool(np.array_equal(diff, np.diag([1.0, 1.0, 0.0])) and final.rho_bar == 1.0)
    ok = worst >= 0 and exact
    return ok, f"min margin {worst:.2e} >= 0; e1/e2 diff diag(1,1,0), rho_bar=1 exactly: {exact}"


def _paired_indices(rank, m, seed, radius, R, d=20, T=500):
    spec = SyntheticEnvSpec(d=d, rank=rank, R=R, K=10, horizon=T)
    base = RunConfig(env=spec, m=m, beta_mult=0.5, radius=radius, seeds=[seed], timing=False)
    sketched = run(RunConfig(**{**base.__dict__, "policy": "soful"})).results[0]
    exact = run(RunConfig(**{**base.__dict__, "policy": "oful"})).results[0]
    return sketched, exact


def criterion_3():
    cases, agree, worst_rho = 0, 0, 0.0
    # same radius for both policies: a constant radius, and the theory radius with R=0
    for radius, R in (("constant", 0.3), ("theory", 0.0)):
        for rank, m in ((1, 2), (3, 4), (4, 8), (7, 8)):
            for seed in (0, 1):
                s, e = _paired_indices(rank, m, seed, radius, R)
                cases += 1
                agree += bool(np.array_equal(s.arm, e.arm))
                worst_rho = max(worst_rho, float(s.rho_bar[-1]))
    ok = agree == cases and worst_rho <= 1e-10
    return ok, f"{agree}/{cases} runs with identical indices over T=500, max rho_bar_T {worst_rho:.1e} <= 1e-10"


def criterion_4():
    start = time.perf_counter()
    cfg = ConfidenceConfig(d=10, m=4, lam=1.0, L=1.0, S_bound=1.0, R=0.5, delta=0.1, horizon=300)
    spec = SyntheticEnvSpec(d=10, K=10, rank=3, R=0.5)
    full = coverage_mc(cfg, spec, runs=500, seed=0)
    control = coverage_mc(cfg, spec, runs=500, seed=0, radius_scale=0.01)
    elapsed = time.perf_counter() - start
    ok = full.rate >= 0.87 and control.rate < 0.9 and elapsed < 300
    return ok, (
        f"coverage {full.rate:.3f} >= 0.87, shrunken control {control.rate:.3f} < 0.9, {elapsed:.0f}s < 300s"
    )


def criterion_5():
    start = time.perf_counter()
    rng = np.random.default_rng(5)
    lev_ok = det_ok = 0
    min_lev = min_det = np.inf
    n = 50
    for i in range(n):
        d = int(rng.integers(2, 33))
        m = int(rng.integers(1, d + 1))
        rank = int(rng.integers(1, d + 1))
        T = int(rng.integers(1, 501))
        R = float(rng.uniform(0.0, 1.0))
        lam = float(10 ** rng.uniform(-1, 1))
        spec = SyntheticEnvSpec(d=d, K=int(rng.integers(2, 11)), rank=rank, R=R, horizon=T, seed=i)
        config = RunConfig(env=spec, m=m, lam=lam, seeds=[i], timing=False, horizon=T)
        stream = config.make_stream(i)
        cfg = config.confidence(stream)
        res = play(stream, Policy("soful", cfg), timing=False)
        lev = check_leverage(res.actions, res.quad_norm, cfg)
        det = check_det_trace(res.actions, cfg)
        lev_ok += lev.passed
        det_ok += det.passed
        min_lev, min_det = min(min_lev, lev.slack), min(min_det, det.slack)
    elapsed = time.perf_counter() - start
    ok = lev_ok == n and det_ok == n and elapsed < 120
    return ok, (
        f"leverage {lev_ok}/{n} (min slack {min_lev:.2e}), det-trace {det_ok}/{n} "
        f"(min slack {min_det:.2e}), {elapsed:.0f}s < 120s"
    )


def criterion_6():
    start = time.perf_counter()
    spec = SyntheticEnvSpec(d=20, K=10, rank=5, R=0.3, horizon=5000)
    out = run(RunConfig(policy="soful", env=spec, m=8, seeds=[0, 1, 2, 3], timing=False))
    cum = out.mean_series("cum_regret")
    per_seed_ok = all(
        np.all(r.cum_regret >= 0) and np.all(np.diff(r.cum_regret) >= 0) for r in out.results
    )
    t = np.arange(1, cum.size + 1)
    window = (t >= 500) & (t <= 5000)
    slope = float(np.polyfit(np.log(t[window]), np.log(cum[window]), 1)[0])
    elapsed = time.perf_counter() - start
    ok = slope <= 0.7 and per_seed_ok and elapsed < 60
    return ok, f"log-log slope {slope:.3f} <= 0.7, cum regret >=0 and non-decreasing: {per_seed_ok}, {elapsed:.0f}s"


def criterion_7(attempts=3):
    # wall-clock timing is noisy on shared machines: re-measure up to `attempts` times
    start = time.perf_counter()
    for attempt in range(1, attempts + 1):
        rows = bench_scaling(ds=(512, 1024), m=16, rounds=300, seed=attempt)
        big = rows[1]
        ok = big["exact_ratio"] >= 3.0 and big["sketched_ratio"] <= 2.6 and big["sketched_mom_ns"] < big["exact_mom_ns"]
        if ok:
            break
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 120
    return ok, (
        f"exact x{big['exact_ratio']:.2f} >= 3.0, sketched x{big['sketched_ratio']:.2f} <= 2.6, "
        f"at d=1024 sketched {big['sketched_mom_ns'] / 1e3:.0f}us < exact {big['exact_mom_ns'] / 1e3:.0f}us, "
        f"attempt {attempt}, {elapsed:.0f}s"
    )


def criterion_8(csv_path):
    """Tune the exact policy on the first rounds, reuse its (beta, lambda) for the sketch at m = 60% of d."""
    source = DatasetSource(path=str(csv_path), label_col="method", target_class="1")
    data = source.load()
    m = int(round(0.6 * data.d))
    base = RunConfig(policy="oful", env=source, radius="constant", seeds=[0, 1, 2, 3], timing=False)
    grid = grid_search(base, *OFUL_GRID, validation_rounds=100)
    tuned = RunConfig(**{**base.__dict__, "beta_mult": grid.beta, "lam": grid.lam})
    exact = run(tuned).mean_series("cum_reward")[-1]
    sketched = run(RunConfig(**{**tuned.__dict__, "policy": "soful", "m": m})).mean_series("cum_reward")[-1]
    gap = abs(sketched - exact) / exact
    ok = gap <= 0.15
    return ok, (
        f"n={data.n} d={data.d} K={data.K}, m={m}, beta={grid.beta:g} lambda={grid.lam:g}: "
        f"sketched {sketched:.1f} vs exact {exact:.1f}, gap {gap:.1%} <= 15%"
    )


def criterion_9():
    rng = np.random.default_rng(9)
    worst = 0.0
    states = []
    for X, m, lam in _random_streams(seed=99, T_min=0):
        state = list(sketch_stream(X, m, lam))[-1]
        states.append(state)
        v = rng.standard_normal(state.d)
        twice = inv_sqrt_apply(state, inv_sqrt_apply(state, v))
        worst = max(worst, _rel(twice, inv_apply(state, v)))
    # paper mode annihilates vectors orthogonal to the rows of the sketch basis U,
    # where the exact inverse square root acts as lam^-1/2
    annihilated = probed = 0
    for state in states:
        U = state.basis[np.linalg.norm(state.basis, axis=1) > 0]
        if U.shape[0] == state.d:
            continue
        u = rng.standard_normal(state.d)
        u -= U.T @ (U @ u)
        probed += 1
        paper = inv_sqrt_apply(state, u, InvSqrtMode.PAPER)
        exact = inv_sqrt_apply(state, u, InvSqrtMode.EXACT)
        annihilated += bool(
            np.linalg.norm(paper) <= 1e-8 * np.linalg.norm(u)
            and _rel(exact, u / np.sqrt(state.lam)) <= 1e-8
        )
    ok = worst <= 1e-8 and probed > 0 and annihilated == probed
    return ok, (
        f"exact mode twice vs inv_apply max rel err {worst:.2e} <= 1e-8 on {len(states)} states; "
        f"paper mode annihilated off-span vectors in {annihilated}/{probed} states (documented discrepancy)"
    )


TITLES = {
    1: "Woodbury inverse vs dense solve",
    2: "Frequent Directions sandwich",
    3: "low-rank SOFUL/OFUL equivalence",
    4: "sketched ellipsoid coverage",
    5: "leverage and det-trace lemmas",
    6: "sublinear regret",
    7: "update-time scaling",
    8: "experiment protocol, m = 60% of d",
    9: "inverse square root contract",
}


def _check(number, *args):
    ok, detail = globals()[f"criterion_{number}"](*args)
    record_acceptance(number, TITLES[number], ok, detail)
    assert ok, detail


def test_criterion_1_woodbury():
    _check(1)


def test_criterion_2_sandwich():
    _check(2)


def test_criterion_3_low_rank_equivalence():
    _check(3)


@pytest.mark.slow
def test_criterion_4_coverage():
    _check(4)


def test_criterion_5_lemmas():
    _check(5)


def test_criterion_6_sublinear_regret():
    _check(6)


@pytest.mark.slow
def test_criterion_7_update_scaling():
    _check(7)


def test_criterion_8_protocol(cmc_csv):
    _check(8, cmc_csv)


def test_criterion_9_inv_sqrt():
    _check(9)


if __name__ == "__main__":
    import tempfile
    from pathlib import Path

    import conftest

    with tempfile.TemporaryDirectory() as tmp:
        X, y = conftest.make_cmc_like()
        names = {1: "no-use", 2: "long-term", 3: "short-term"}
        path = Path(tmp) / "cmc_like.csv"
        with open(path, "w") as fh:
            fh.write(",".join([f"f{j}" for j in range(X.shape[1])] + ["method"]) + "\n")
            for row, label in zip(X, y):
                fh.write(",".join(f"{v:.6f}" for v in row) + f",{names[label]}\n")
        for n in TITLES:
            ok, detail = globals()[f"criterion_{n}"](*([path] if n == 8 else []))
            record_acceptance(n, TITLES[n], ok, detail)
