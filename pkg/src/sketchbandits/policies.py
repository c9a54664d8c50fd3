"""OFUL, SOFUL, linear TS and sketched linear TS behind one select/update contract.

Each policy keeps an RLS state (exact or sketched) and scores every candidate
context of the round; ties go to the lowest index. The ``*_select`` functions
are pure given their inputs and the randomness (``Z``) is injected, so paired
runs and replays are exact.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .confidence import beta_oful, beta_sketched
from .linalg import sym_eig
from .sketch import InvSqrtMode, SketchState, fd_update, inv_apply, inv_sqrt_apply, quad_norms


class PolicyKind(str, Enum):
    OFUL = "oful"
    SOFUL = "soful"
    LINTS = "lints"
    SLINTS = "slints"

    @property
    def sketched(self):
        return self in (PolicyKind.SOFUL, PolicyKind.SLINTS)

    @property
    def sampling(self):
        return self in (PolicyKind.LINTS, PolicyKind.SLINTS)

    @property
    def exact_counterpart(self):
        return {PolicyKind.SOFUL: PolicyKind.OFUL, PolicyKind.SLINTS: PolicyKind.LINTS}.get(self, self)

    @property
    def sketched_counterpart(self):
        return {PolicyKind.OFUL: PolicyKind.SOFUL, PolicyKind.LINTS: PolicyKind.SLINTS}.get(self, self)


@dataclass
class ExactRlsState:
    """Dense ridge-regression state; updated in place by :meth:`update`."""

    V: np.ndarray
    V_inv: np.ndarray
    b: np.ndarray
    w_hat: np.ndarray
    t: int = 0

    @classmethod
    def initial(cls, d, lam):
        return cls(
            V=lam * np.eye(d),
            V_inv=np.eye(d) / lam,
            b=np.zeros(d),
            w_hat=np.zeros(d),
        )

    @property
    def d(self):
        return self.b.shape[0]

    def update(self, x, y):
        """Rank-one Sherman-Morrison step, ``Theta(d^2)``."""
        x = _check_context(x, self.d)
        Vx = self.V_inv @ x
        self.V_inv -= np.outer(Vx, Vx / (1.0 + x @ Vx))
        self.V += np.outer(x, x)
        self.b += y * x
        self.w_hat = self.V_inv @ self.b
        self.t += 1
        return self

    def quad_norms(self, X):
        sq = np.einsum("ij,ij->i", X @ self.V_inv, X)
        return np.sqrt(np.maximum(sq, 0.0))

    def inv_sqrt_apply(self, v):
        # full eigendecomposition every call: the exact baseline pays O(d^3) here
        eig = sym_eig((self.V + self.V.T) / 2.0)
        return eig.vectors.T @ ((eig.vectors @ v) / np.sqrt(eig.values))


@dataclass
class SketchedRlsState:
    """Ridge regression on the Frequent Directions proxy ``S.T S + lam I``."""

    sketch: SketchState
    b: np.ndarray
    w_tilde: np.ndarray
    t: int = 0

    @classmethod
    def initial(cls, m, d, lam):
        return cls(sketch=SketchState.empty(m, d, lam), b=np.zeros(d), w_tilde=np.zeros(d))

    @property
    def d(self):
        return self.b.shape[0]

    @property
    def rho_bar(self):
        return self.sketch.rho_bar

    def update(self, x, y):
        """Sketch ``x`` and refresh the estimate; ``O(m^2 d)``, nothing of size ``d^2``."""
        x = _check_context(x, self.d)
        self.sketch = fd_update(self.sketch, x)
        self.b += y * x
        self.w_tilde = inv_apply(self.sketch, self.b)
        self.t += 1
        return self

    def quad_norms(self, X):
        return quad_norms(self.sketch, X)


def _check_context(x, d):
    x = np.asarray(x, dtype=float)
    if x.shape != (d,):
        raise ValueError(f"context must have shape ({d},), got {x.shape}")
    return x


def _contexts(D, d):
    D = np.asarray(D, dtype=float)
    if D.ndim != 2 or D.shape[0] == 0:
        raise ValueError("decision set must be a non-empty K x d array")
    if D.shape[1] != d:
        raise ValueError(f"contexts must have dimension {d}, got {D.shape[1]}")
    return D


TIE_RTOL = 1e-12


def _argmax(scores):
    """Lowest index among scores within rounding of the maximum.

    Duplicate contexts score equal only up to floating-point noise, which
    differs between the exact and sketched arithmetic; a relative tolerance
    keeps the lowest-index tie-break deterministic across both.
    """
    scores = np.asarray(scores, dtype=float)
    top = scores.max()
    return int(np.argmax(scores >= top - TIE_RTOL * (1.0 + abs(top))))


def oful_select(state, cfg, D, beta_mult=1.0, radius=None):
    """Optimistic choice ``argmax w_hat.x + beta ||x||_{V^{-1}}``.

    ``radius`` overrides the theoretical ``beta_mult * beta_oful(cfg, t)``.
    """
    D = _contexts(D, state.d)
    if radius is None:
        radius = beta_mult * beta_oful(cfg, state.t)
    return _argmax(D @ state.w_hat + radius * state.quad_norms(D))


def soful_select(state, cfg, D, beta_mult=1.0, radius=None):
    D = _contexts(D, state.d)
    if radius is None:
        radius = beta_mult * beta_sketched(cfg, state.t, state.rho_bar)
    return _argmax(D @ state.w_tilde + radius * state.quad_norms(D))


def lin_ts_select(state, cfg, D, Z, beta_mult=1.0, radius=None):
    """Perturbed-greedy choice ``argmax x.(w_hat + radius V^{-1/2} Z)``."""
    D = _contexts(D, state.d)
    Z = np.asarray(Z, dtype=float)
    if radius is None:
        radius = beta_mult * beta_oful(cfg, state.t, delta=cfg.ts_delta)
    if not np.any(Z):
        return _argmax(D @ state.w_hat)
    return _argmax(D @ (state.w_hat + radius * state.inv_sqrt_apply(Z)))


def sketched_ts_select(state, cfg, D, Z, mode=InvSqrtMode.EXACT, beta_mult=1.0, radius=None):
    D = _contexts(D, state.d)
    if radius is None:
        radius = beta_mult * beta_sketched(cfg, state.t, state.rho_bar, delta=cfg.ts_delta)
    perturbation = inv_sqrt_apply(state.sketch, Z, mode)
    return _argmax(D @ (state.w_tilde + radius * perturbation))


def policy_update(state, x, y):
    return state.update(x, y)


@dataclass
class Policy:
    """A bandit policy bound to its configuration and random source.

    ``radius="theory"`` scales the theoretical confidence radius by
    ``beta_mult``; ``radius="constant"`` uses ``beta_mult`` itself as the
    radius, which is how the radius is grid-searched on real datasets.
    """

    kind: PolicyKind
    cfg: object
    beta_mult: float = 1.0
    radius: str = "theory"
    inv_sqrt: InvSqrtMode = InvSqrtMode.EXACT
    rng: np.random.Generator = field(default_factory=lambda: np.random.default_rng(0))

    def __post_init__(self):
        self.kind = PolicyKind(self.kind)
        self.inv_sqrt = InvSqrtMode(self.inv_sqrt)
        if self.radius not in ("theory", "constant"):
            raise ValueError(f"radius must be 'theory' or 'constant', got {self.radius!r}")
        if not self.beta_mult >= 0:
            raise ValueError("beta_mult must be non-negative")
        cfg = self.cfg
        if self.kind.sketched:
            self.state = SketchedRlsState.initial(cfg.m, cfg.d, cfg.lam)
        else:
            self.state = ExactRlsState.initial(cfg.d, cfg.lam)

    @property
    def rho_bar(self):
        return self.state.rho_bar if self.kind.sketched else 0.0

    @property
    def estimate(self):
        return self.state.w_tilde if self.kind.sketched else self.state.w_hat

    def _radius(self):
        return self.beta_mult if self.radius == "constant" else None

    def select(self, D):
        kw = dict(beta_mult=self.beta_mult, radius=self._radius())
        if self.kind is PolicyKind.OFUL:
            return oful_select(self.state, self.cfg, D, **kw)
        if self.kind is PolicyKind.SOFUL:
            return soful_select(self.state, self.cfg, D, **kw)
        Z = self.rng.standard_normal(self.cfg.d)
        if self.kind is PolicyKind.LINTS:
            return lin_ts_select(self.state, self.cfg, D, Z, **kw)
        return sketched_ts_select(self.state, self.cfg, D, Z, self.inv_sqrt, **kw)

    def quad_norm(self, x):
        return float(self.state.quad_norms(np.asarray(x, dtype=float)[None, :])[0])

    def update(self, x, y):
        self.state.update(x, y)
