"""Experiment harness: protocol loop, multi-seed runs, grid search, PCA baselines, timing.

Outputs follow one schema. Every (config, seed) cell produces a CSV with the
columns of :data:`CSV_COLUMNS`; a run also writes a JSON summary and a CSV of
the per-round mean over seeds.
"""

import csv
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .confidence import ConfidenceConfig
from .environments import (
    SyntheticEnvSpec,
    classification_to_bandit,
    ingest_csv,
    pca_project,
    synth_generate,
)
from .policies import ExactRlsState, Policy, PolicyKind, SketchedRlsState

log = logging.getLogger(__name__)

CSV_COLUMNS = ("t", "arm", "reward", "cum_reward", "regret", "cum_regret", "quad_norm", "rho_bar", "update_ns")
SERIES_COLUMNS = ("reward", "cum_reward", "regret", "cum_regret", "quad_norm", "rho_bar", "update_ns")

# (beta, lambda) grids used to tune the baselines on real datasets
OFUL_GRID = ((1.0, 1e2, 1e3, 1e4), (1e-2, 1e-1, 1.0))
TS_GRID = ((1.0, 1e2, 1e3), (1e-2, 1e-1, 1.0, 1e2))

PCA_FRACTIONS = (0.6, 0.4, 0.2)


@dataclass
class RunResult:
    """Per-round log of one run; cumulative columns are prefix sums."""

    arm: np.ndarray
    reward: np.ndarray
    regret: np.ndarray
    quad_norm: np.ndarray
    rho_bar: np.ndarray
    update_ns: np.ndarray
    actions: np.ndarray
    seed: int | None = None
    final_sketch: dict | None = None

    @property
    def T(self):
        return self.arm.shape[0]

    @property
    def cum_reward(self):
        return np.cumsum(self.reward)

    @property
    def cum_regret(self):
        return np.cumsum(self.regret)

    def series(self, name):
        if name == "t":
            return np.arange(1, self.T + 1)
        return getattr(self, name)

    def summary(self):
        return {
            "seed": self.seed,
            "rounds": self.T,
            "total_reward": float(self.reward.sum()),
            "total_regret": float(self.regret.sum()),
            "mean_update_ns": float(self.update_ns.mean()) if self.T else 0.0,
            "final_rho_bar": float(self.rho_bar[-1]) if self.T else 0.0,
        }

    def write_csv(self, path):
        cols = [self.series(c) for c in CSV_COLUMNS]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_COLUMNS)
            for row in zip(*cols):
                w.writerow([_fmt(v) for v in row])


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def read_run_csv(path):
    """Load a run CSV back into a dict of numpy columns."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
    return {c: np.array([float(r[c]) for r in rows]) for c in reader.fieldnames}


def play(stream, policy, rounds=None, timing=True):
    """Run the bandit protocol: get decision set, select, observe, update."""
    T = stream.T if rounds is None else min(rounds, stream.T)
    arm = np.zeros(T, dtype=int)
    reward, regret, qn, rho, ns = (np.zeros(T) for _ in range(5))
    actions = np.zeros((T, stream.d))
    clock = time.perf_counter_ns
    for t in range(T):
        D = stream.decision_set(t)
        k = policy.select(D)
        x = D[k]
        y = stream.reward(t, k)
        qn[t] = policy.quad_norm(x)
        start = clock()
        policy.update(x, y)
        ns[t] = clock() - start if timing else 0
        arm[t], reward[t], regret[t] = k, y, stream.regret(t, k)
        rho[t] = policy.rho_bar
        actions[t] = x
    return RunResult(arm=arm, reward=reward, regret=regret, quad_norm=qn, rho_bar=rho, update_ns=ns, actions=actions)


@dataclass
class DatasetSource:
    """Classification data for the bandit conversion, from a CSV path or in memory."""

    path: str | None = None
    label_col: str = "label"
    target_class: str = "1"
    normalization: str = "global_max_norm"
    data: object = None

    def load(self):
        if self.data is None:
            if self.path is None:
                raise ValueError("dataset source needs a path or in-memory data")
            self.data = ingest_csv(self.path, self.label_col, self.normalization)
        return self.data


@dataclass
class RunConfig:
    """Everything needed to reproduce a multi-seed run.

    ``R`` defaults to the synthetic noise level (or 1 for datasets) and
    ``horizon`` to the stream length. ``radius`` selects between scaling the
    theoretical confidence radius (``"theory"``) and using ``beta_mult`` as
    the radius outright (``"constant"``).
    """

    policy: PolicyKind = PolicyKind.SOFUL
    env: object = None
    m: int = 8
    lam: float = 1.0
    beta_mult: float = 1.0
    radius: str = "theory"
    delta: float = 0.05
    horizon: int | None = None
    S_bound: float | None = None
    R: float | None = None
    L: float | None = None
    inv_sqrt: str = "exact"
    seeds: list = field(default_factory=lambda: [0, 1, 2, 3])
    out: str | None = None
    timing: bool = True
    name: str | None = None

    def __post_init__(self):
        self.policy = PolicyKind(self.policy)
        if not self.seeds:
            raise ValueError("seeds must be non-empty")
        if self.env is None:
            self.env = SyntheticEnvSpec(d=20, rank=5, R=0.3)

    @property
    def tag(self):
        return self.name or self.policy.value

    def make_stream(self, seed):
        if isinstance(self.env, SyntheticEnvSpec):
            spec = replace(self.env, seed=seed, horizon=self.horizon or self.env.horizon)
            return synth_generate(spec)
        data = self.env.load()
        stream = classification_to_bandit(data, self.env.target_class, seed=seed)
        return stream.truncate(self.horizon) if self.horizon else stream

    def confidence(self, stream):
        synthetic = isinstance(self.env, SyntheticEnvSpec)
        d = stream.d
        return ConfidenceConfig(
            d=d,
            m=min(self.m, d),
            lam=self.lam,
            L=self.L if self.L is not None else max(stream.max_norm(), 1e-12),
            S_bound=self.S_bound if self.S_bound is not None else (self.env.S_bound if synthetic else 1.0),
            R=self.R if self.R is not None else (self.env.R if synthetic else 1.0),
            delta=self.delta,
            horizon=stream.T,
        )

    def make_policy(self, stream, seed):
        cfg = self.confidence(stream)
        if stream.max_norm() > cfg.L * (1 + 1e-9):
            raise ValueError(f"contexts exceed the norm bound L={cfg.L}")
        rng = np.random.default_rng(np.random.SeedSequence([seed, 7919]))
        return Policy(self.policy, cfg, self.beta_mult, self.radius, self.inv_sqrt, rng)

    def to_json(self):
        obj = {k: v for k, v in asdict(self).items() if k != "env"}
        obj["policy"] = self.policy.value
        if isinstance(self.env, SyntheticEnvSpec):
            obj["env"] = {"type": "synthetic", **asdict(self.env)}
        else:
            obj["env"] = {
                "type": "dataset",
                "path": self.env.path,
                "label_col": self.env.label_col,
                "target_class": self.env.target_class,
                "normalization": self.env.normalization,
            }
        return obj

    @classmethod
    def from_json(cls, obj):
        obj = dict(obj)
        env = dict(obj.pop("env", None) or {"type": "synthetic", "d": 20})
        kind = env.pop("type", "synthetic")
        obj["env"] = SyntheticEnvSpec(**env) if kind == "synthetic" else DatasetSource(**env)
        return cls(**obj)


@dataclass
class RunOutput:
    config: RunConfig
    results: list

    def mean_series(self, name):
        return np.mean([r.series(name) for r in self.results], axis=0)

    def std_series(self, name):
        return np.std([r.series(name) for r in self.results], axis=0)

    def summary(self):
        per_seed = [r.summary() for r in self.results]
        return {
            "config": self.config.to_json(),
            "per_seed": per_seed,
            "mean_total_reward": float(np.mean([s["total_reward"] for s in per_seed])),
            "mean_total_regret": float(np.mean([s["total_regret"] for s in per_seed])),
            "mean_update_ns": float(np.mean([s["mean_update_ns"] for s in per_seed])),
        }

    def write(self, out):
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        tag = self.config.tag
        for r in self.results:
            r.write_csv(out / f"{tag}_seed{r.seed}.csv")
            if r.final_sketch is not None:
                with open(out / f"{tag}_seed{r.seed}_sketch.json", "w") as fh:
                    json.dump(r.final_sketch, fh)
        with open(out / f"{tag}_mean.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            cols = ["t", *SERIES_COLUMNS, "cum_reward_std"]
            w.writerow(cols)
            data = [self.mean_series(c) for c in cols[:-1]] + [self.std_series("cum_reward")]
            for row in zip(*data):
                w.writerow([_fmt(v) for v in row])
        with open(out / f"{tag}_summary.json", "w") as fh:
            json.dump(self.summary(), fh, indent=2)


def _run_seed(config, seed):
    stream = config.make_stream(seed)
    policy = config.make_policy(stream, seed)
    result = play(stream, policy, timing=config.timing)
    result.seed = seed
    if config.policy.sketched:
        result.final_sketch = policy.state.sketch.to_json()
    return result


def run(config, jobs=1):
    """Execute the protocol for every seed; seeds are independent cells."""
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_seed, [config] * len(config.seeds), config.seeds))
    else:
        results = [_run_seed(config, s) for s in config.seeds]
    output = RunOutput(config=config, results=results)
    if config.out:
        output.write(config.out)
    return output


@dataclass
class GridResult:
    beta: float
    lam: float
    table: list

    def to_json(self):
        return {"best_beta": self.beta, "best_lambda": self.lam, "table": self.table}


def grid_search(base, beta_grid, lambda_grid, validation_rounds=100):
    """Pick ``(beta, lambda)`` maximizing mean cumulative reward on the first rounds.

    Cells are visited beta-major; the first best cell wins ties.
    """
    beta_grid, lambda_grid = list(beta_grid), list(lambda_grid)
    if not beta_grid or not lambda_grid:
        raise ValueError("grids must be non-empty")
    streams = {s: base.make_stream(s) for s in base.seeds}
    T = min(st.T for st in streams.values())
    if validation_rounds > T:
        raise ValueError(f"validation_rounds={validation_rounds} exceeds stream length {T}")
    table, best = [], None
    for beta in beta_grid:
        for lam in lambda_grid:
            cell = replace(base, beta_mult=beta, lam=lam, out=None)
            rewards = []
            for seed, stream in streams.items():
                res = play(stream, cell.make_policy(stream, seed), rounds=validation_rounds, timing=False)
                rewards.append(res.reward.sum())
            score = float(np.mean(rewards))
            table.append({"beta": beta, "lambda": lam, "mean_reward": score})
            if best is None or score > best[0]:
                best = (score, beta, lam)
            log.info("grid cell beta=%g lambda=%g -> %.3f", beta, lam, score)
    return GridResult(beta=best[1], lam=best[2], table=table)


def _median_of_means(samples, batches):
    chunks = np.array_split(np.asarray(samples, dtype=float), batches)
    return float(np.median([c.mean() for c in chunks if c.size]))


def bench_update(d, m, rounds=200, seed=0, warmup=50, batches=5, lam=1.0):
    """Per-update wall time of the exact and sketched RLS states on one random stream."""
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((warmup + rounds, d))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    y = rng.standard_normal(warmup + rounds)
    row = {"d": d, "m": m, "rounds": rounds}
    for name, state in (
        ("exact", ExactRlsState.initial(d, lam)),
        ("sketched", SketchedRlsState.initial(m, d, lam)),
    ):
        times = np.empty(warmup + rounds)
        for i in range(warmup + rounds):
            start = time.perf_counter_ns()
            state.update(X[i], y[i])
            times[i] = time.perf_counter_ns() - start
        kept = times[warmup:]
        row[f"{name}_mean_ns"] = float(kept.mean())
        row[f"{name}_mom_ns"] = _median_of_means(kept, batches)
    return row


def bench_scaling(ds=(256, 512, 1024), m=16, rounds=200, seed=0):
    """Doubling series at fixed ``m``; adds growth ratios between consecutive sizes."""
    rows = [bench_update(d, m, rounds=rounds, seed=seed) for d in ds]
    for prev, cur in zip(rows, rows[1:]):
        for name in ("exact", "sketched"):
            cur[f"{name}_ratio"] = cur[f"{name}_mom_ns"] / prev[f"{name}_mom_ns"]
    return rows


@dataclass
class PcaComparison:
    fraction: float
    m: int
    exact_on_pca: RunOutput
    sketched: RunOutput

    def table(self):
        return {
            "fraction": self.fraction,
            "m": self.m,
            "exact_on_pca_cum_reward": self.exact_on_pca.mean_series("cum_reward").tolist(),
            "sketched_cum_reward": self.sketched.mean_series("cum_reward").tolist(),
        }


def compare_pca(base, fractions=PCA_FRACTIONS):
    """Exact policy on the best ``m``-dim PCA subspace vs sketched policy with sketch size ``m``.

    ``base`` must use a dataset environment; its policy kind picks the family
    (OFUL/SOFUL or TS/sketched TS). Both arms share seeds, hence streams.
    """
    if isinstance(base.env, SyntheticEnvSpec):
        raise ValueError("compare_pca needs a dataset environment")
    data = base.env.load()
    exact_kind = base.policy.exact_counterpart
    sketched_kind = base.policy.sketched_counterpart
    out = []
    for frac in fractions:
        m = int(round(frac * data.d))
        if m < 1:
            raise ValueError(f"fraction {frac} gives sketch size m={m} < 1 for d={data.d}")
        projected = DatasetSource(
            label_col=base.env.label_col,
            target_class=base.env.target_class,
            normalization=base.env.normalization,
            data=pca_project(data, m),
        )
        sub = None if base.out is None else str(Path(base.out) / f"pca{frac:g}")
        a = run(replace(base, policy=exact_kind, env=projected, m=m, out=sub, name=f"{exact_kind.value}_pca"))
        b = run(replace(base, policy=sketched_kind, m=m, out=sub, name=f"{sketched_kind.value}_m{m}"))
        out.append(PcaComparison(fraction=frac, m=m, exact_on_pca=a, sketched=b))
    return out
