import numpy as np
import pytest

from sketchbandits import LabeledDataset


def random_stream(rng, T, d, rank=None, scale=1.0):
    """T unit-ish contexts in R^d, optionally confined to a random rank-r subspace."""
    if rank is None or rank >= d:
        X = rng.standard_normal((T, d))
    else:
        B, _ = np.linalg.qr(rng.standard_normal((d, rank)))
        X = rng.standard_normal((T, rank)) @ B.T
    # decaying column scales give a non-flat spectrum
    X *= np.linspace(1.0, 0.2, d) if rank is None else 1.0
    return scale * X / np.maximum(np.linalg.norm(X, axis=1, keepdims=True), 1e-12)


def make_cmc_like(seed=0, sizes=(629, 333, 511), d=9, separation=0.7):
    """Three-class mixture shaped like CMC: ~1.5k instances, 9 features."""
    rng = np.random.default_rng(seed)
    rot, _ = np.linalg.qr(rng.standard_normal((d, d)))
    scales = np.linspace(1.5, 0.3, d)
    means = separation * rng.standard_normal((len(sizes), d)) + 2.0
    X, y = [], []
    for k, n in enumerate(sizes):
        X.append(means[k] + (rng.standard_normal((n, d)) * scales) @ rot.T)
        y += [k + 1] * n
    X, y = np.vstack(X), np.array(y)
    p = rng.permutation(len(y))
    return X[p], y[p]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def cmc_csv(tmp_path):
    X, y = make_cmc_like()
    names = {1: "no-use", 2: "long-term", 3: "short-term"}
    path = tmp_path / "cmc_like.csv"
    with open(path, "w") as fh:
        fh.write(",".join([f"f{j}" for j in range(X.shape[1])] + ["method"]) + "\n")
        for row, label in zip(X, y):
            fh.write(",".join(f"{v:.6f}" for v in row) + f",{names[label]}\n")
    return path


@pytest.fixture
def small_dataset():
    X = np.array([[1.0, 0.0], [0.0, 1.0], [0.5, 0.5], [0.2, 0.9], [0.9, 0.1], [0.3, 0.3]])
    return LabeledDataset(features=X, labels=[1, 2, 1, 2, 1, 2], name="toy")


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES = {}


def record_acceptance(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
