"""Reward-generating environments.

Two sources of bandit streams:

* synthetic linear bandits with a known parameter ``w_star`` whose contexts
  live in a fixed low-dimensional subspace, and
* labeled classification data turned into a bandit problem: one permuted
  sequence per class, the round's decision set is the ``t``-th instance of
  every sequence, and reward is 1 exactly for instances of a chosen class.

A :class:`BanditStream` materializes the whole horizon up front, so the reward
tape is a deterministic function of the chosen indices.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import sym_eig


@dataclass(frozen=True)
class SyntheticEnvSpec:
    d: int
    K: int = 10
    S_bound: float = 1.0
    R: float = 0.1
    rank: int | None = None
    L: float = 1.0
    horizon: int = 1000
    seed: int = 0

    def __post_init__(self):
        rank = self.d if self.rank is None else self.rank
        if not 1 <= rank <= self.d:
            raise ValueError(f"rank must satisfy 1 <= rank <= d, got {rank}")
        if self.K < 2:
            raise ValueError(f"K must be >= 2, got {self.K}")
        if self.R < 0 or self.S_bound <= 0 or self.L <= 0 or self.horizon < 1:
            raise ValueError("invalid synthetic environment constants")
        object.__setattr__(self, "rank", rank)


@dataclass
class BanditStream:
    """A finite horizon of decision sets with a hidden reward table.

    ``rewards[t, k]`` is what playing arm ``k`` at round ``t`` returns and
    ``means[t, k]`` its expectation; regret is measured against ``means``.
    """

    contexts: np.ndarray
    rewards: np.ndarray
    means: np.ndarray
    w_star: np.ndarray | None = None
    labels: np.ndarray | None = None
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.contexts.ndim != 3:
            raise ValueError("contexts must have shape (T, K, d)")
        T, K, _ = self.contexts.shape
        if K < 1:
            raise ValueError("decision sets must be non-empty")
        if self.rewards.shape != (T, K) or self.means.shape != (T, K):
            raise ValueError("rewards and means must have shape (T, K)")

    @property
    def T(self):
        return self.contexts.shape[0]

    @property
    def K(self):
        return self.contexts.shape[1]

    @property
    def d(self):
        return self.contexts.shape[2]

    def decision_set(self, t):
        return self.contexts[t]

    def reward(self, t, arm):
        return float(self.rewards[t, arm])

    def regret(self, t, arm):
        return float(self.means[t].max() - self.means[t, arm])

    def max_norm(self):
        return float(np.sqrt(np.max(np.einsum("tkd,tkd->tk", self.contexts, self.contexts))))

    def truncate(self, T):
        T = min(T, self.T)
        return BanditStream(
            contexts=self.contexts[:T],
            rewards=self.rewards[:T],
            means=self.means[:T],
            w_star=self.w_star,
            labels=None if self.labels is None else self.labels[:T],
            info=dict(self.info),
        )


def synth_generate(spec):
    """Draw a synthetic linear bandit stream.

    A random rank-``spec.rank`` orthonormal basis spans every context and the
    parameter. ``w_star`` is uniform on the radius-``S_bound`` sphere of that
    subspace; contexts are uniform on the radius-``L`` sphere of it. Reward is
    ``x.w_star + eta`` with ``eta ~ N(0, R^2)`` drawn once per round.
    """
    rng = np.random.default_rng(spec.seed)
    d, r, K, T = spec.d, spec.rank, spec.K, spec.horizon
    basis, _ = np.linalg.qr(rng.standard_normal((d, r)))
    g = rng.standard_normal(r)
    w_star = spec.S_bound * basis @ (g / np.linalg.norm(g))
    coords = rng.standard_normal((T, K, r))
    coords *= spec.L / np.linalg.norm(coords, axis=2, keepdims=True)
    contexts = coords @ basis.T
    means = contexts @ w_star
    noise = spec.R * rng.standard_normal(T)
    return BanditStream(
        contexts=contexts,
        rewards=means + noise[:, None],
        means=means,
        w_star=w_star,
        info={"kind": "synthetic", "noise": noise, "basis": basis},
    )


@dataclass
class LabeledDataset:
    """Feature matrix with integer class labels in ``1..K``."""

    features: np.ndarray
    labels: np.ndarray
    class_names: list = field(default_factory=list)
    name: str = "dataset"

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=float)
        self.labels = np.asarray(self.labels, dtype=int)
        if self.features.ndim != 2 or self.features.shape[0] != self.labels.shape[0]:
            raise ValueError("features must be n x d with one label per row")
        if self.features.shape[0] == 0:
            raise ValueError("dataset is empty")
        if not np.all(np.isfinite(self.features)):
            raise ValueError("features must be finite")
        if not self.class_names:
            self.class_names = [str(k) for k in range(1, int(self.labels.max()) + 1)]
        missing = set(range(1, self.K + 1)) - set(self.labels.tolist())
        if missing or self.labels.min() < 1:
            raise ValueError(f"labels must cover 1..K with every class present, missing {sorted(missing)}")

    @property
    def d(self):
        return self.features.shape[1]

    @property
    def K(self):
        return len(self.class_names)

    @property
    def n(self):
        return self.features.shape[0]

    def class_sizes(self):
        return np.bincount(self.labels, minlength=self.K + 1)[1:]

    def label_of(self, name):
        """Map a class name (or a 1-based id) to its label id."""
        name = str(name)
        if name in self.class_names:
            return self.class_names.index(name) + 1
        if name.isdigit() and 1 <= int(name) <= self.K:
            return int(name)
        raise ValueError(f"unknown class {name!r}; known classes {self.class_names}")


def classification_to_bandit(data, target_class, seed=0):
    """Turn a labeled dataset into a bandit stream rewarding ``target_class``.

    ``target_class`` is a label id in ``1..K`` (or a class name). The horizon
    is the size of the smallest class; slot ``k`` of every decision set holds
    an instance of class ``k + 1``.
    """
    target = data.label_of(target_class)
    rng = np.random.default_rng(seed)
    sequences = [rng.permutation(np.flatnonzero(data.labels == k)) for k in range(1, data.K + 1)]
    T = min(len(s) for s in sequences)
    order = np.stack([s[:T] for s in sequences], axis=1)
    contexts = data.features[order]
    labels = data.labels[order]
    rewards = (labels == target).astype(float)
    return BanditStream(
        contexts=contexts,
        rewards=rewards,
        means=rewards.copy(),
        labels=labels,
        info={"kind": "classification", "target": target, "indices": order, "name": data.name},
    )


class IngestError(ValueError):
    pass


def ingest_csv(path, label_column, normalization="global_max_norm", name=None):
    """Read a headered CSV with one categorical label column and numeric features.

    Labels are numbered ``1..K`` in order of first appearance. With
    ``normalization="global_max_norm"`` every row is divided by the largest
    row norm, so all contexts satisfy ``||x|| <= 1``.
    """
    if normalization not in ("global_max_norm", "none"):
        raise ValueError(f"unknown normalization {normalization!r}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise IngestError(f"{path}: empty file") from None
        if label_column not in header:
            raise IngestError(f"{path}: no column named {label_column!r} in header {header}")
        label_idx = header.index(label_column)
        rows, labels, class_names, errors = [], [], [], []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                errors.append(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
                continue
            label = row[label_idx].strip()
            values = []
            for j, cell in enumerate(row):
                if j == label_idx:
                    continue
                cell = cell.strip()
                try:
                    v = float(cell)
                except ValueError:
                    errors.append(f"line {lineno}: column {header[j]!r} is not numeric: {cell!r}")
                    break
                if not math.isfinite(v):
                    errors.append(f"line {lineno}: column {header[j]!r} is not finite: {cell!r}")
                    break
                values.append(v)
            else:
                if not label:
                    errors.append(f"line {lineno}: missing label")
                    continue
                if label not in class_names:
                    class_names.append(label)
                rows.append(values)
                labels.append(class_names.index(label) + 1)
    if errors:
        raise IngestError(f"{path}: {len(errors)} unparseable row(s):\n" + "\n".join(errors[:20]))
    if not rows:
        raise IngestError(f"{path}: no data rows")
    if len(class_names) < 2:
        raise IngestError(f"{path}: label column {label_column!r} is constant (K=1)")
    X = np.asarray(rows, dtype=float)
    if normalization == "global_max_norm":
        scale = np.linalg.norm(X, axis=1).max()
        if scale > 0:
            X = X / scale
    return LabeledDataset(
        features=X,
        labels=np.asarray(labels),
        class_names=class_names,
        name=name or str(path),
    )


def pca_project(data, m):
    """Coordinates of every instance on the top-``m`` eigenvectors of ``X.T X`` (uncentered)."""
    if not 1 <= m <= data.d:
        raise ValueError(f"m must satisfy 1 <= m <= d={data.d}, got {m}")
    X = data.features
    eig = sym_eig(X.T @ X)
    return LabeledDataset(
        features=X @ eig.vectors[:m].T,
        labels=data.labels.copy(),
        class_names=list(data.class_names),
        name=f"{data.name}[pca{m}]",
    )
