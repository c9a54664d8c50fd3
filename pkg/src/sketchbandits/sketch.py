"""Frequent Directions sketch of the action correlation matrix.

The sketch keeps an ``m x d`` matrix ``S`` whose rows are orthogonal and whose
last row is zero. ``S.T @ S + lam * I`` stands in for the regularized
correlation matrix ``X.T @ X + lam * I``, and both its inverse and its inverse
square root are applied to vectors in ``O(md)`` time through the eigenbasis
``U`` of the sketch.

The state is stored as ``(spectrum, basis)``: ``spectrum`` holds the
eigenvalues of ``S_prev.T @ S_prev + x x.T`` *before* shrinkage, so the
current shrinkage is ``spectrum[-1]`` and ``S = diag(sqrt(spectrum - spectrum[-1])) @ basis``.
"""

import json
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .linalg import thin_svd_rows

# relative floor below which spectrum values are treated as exact zeros
SPECTRUM_FLOOR = 1e-12


class InvSqrtMode(str, Enum):
    EXACT = "exact"
    PAPER = "paper"


@dataclass(frozen=True)
class SketchState:
    m: int
    d: int
    lam: float
    spectrum: np.ndarray
    basis: np.ndarray
    rho_bar: float = 0.0
    t: int = 0

    @classmethod
    def empty(cls, m, d, lam):
        if not 1 <= m <= d:
            raise ValueError(f"sketch size must satisfy 1 <= m <= d, got m={m}, d={d}")
        if not lam > 0:
            raise ValueError(f"lam must be positive, got {lam}")
        return cls(
            m=int(m),
            d=int(d),
            lam=float(lam),
            spectrum=np.zeros(m),
            basis=np.zeros((m, d)),
        )

    @property
    def rho_last(self):
        """Shrinkage applied by the most recent update (0 for the empty sketch)."""
        return float(self.spectrum[-1])

    @property
    def shrunk(self):
        """Squared row norms of ``S``, i.e. ``spectrum - spectrum[-1]``."""
        return self.spectrum - self.spectrum[-1]

    @property
    def S(self):
        return np.sqrt(self.shrunk)[:, None] * self.basis

    @property
    def H_diag(self):
        return 1.0 / (self.shrunk + self.lam)

    def to_json(self):
        return {
            "m": self.m,
            "d": self.d,
            "lambda": self.lam,
            "spectrum": self.spectrum.tolist(),
            "basis_rows": self.basis.tolist(),
            "rho_bar": self.rho_bar,
            "t": self.t,
        }

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        m, d = int(obj["m"]), int(obj["d"])
        spectrum = np.asarray(obj["spectrum"], dtype=float)
        basis = np.asarray(obj["basis_rows"], dtype=float).reshape(m, d)
        if spectrum.shape != (m,):
            raise ValueError(f"spectrum must have length m={m}")
        if np.any(np.diff(spectrum) > 0) or np.any(spectrum < 0):
            raise ValueError("spectrum must be non-negative and non-increasing")
        return cls(
            m=m,
            d=d,
            lam=float(obj["lambda"]),
            spectrum=spectrum,
            basis=basis,
            rho_bar=float(obj["rho_bar"]),
            t=int(obj["t"]),
        )


def _check_vector(state, v, name="x"):
    v = np.asarray(v, dtype=float)
    if v.shape != (state.d,):
        raise ValueError(f"{name} must have shape ({state.d},), got {v.shape}")
    return v


def fd_update(state, x):
    """Absorb one context vector and return the new sketch state.

    The zero last row of ``S`` is overwritten with ``x`` and the ``m x d``
    stack is re-diagonalized by a thin SVD, which is exact because the stack
    has rank at most ``m``. Cost ``O(m^2 d)``.
    """
    x = _check_vector(state, x)
    if not np.all(np.isfinite(x)):
        raise ValueError("x has non-finite entries")
    stack = state.S
    stack[-1] = x
    sigma, Vt = thin_svd_rows(stack)
    spectrum = sigma**2
    spectrum[spectrum < SPECTRUM_FLOOR * (spectrum[0] + 1.0)] = 0.0
    return SketchState(
        m=state.m,
        d=state.d,
        lam=state.lam,
        spectrum=spectrum,
        basis=Vt,
        rho_bar=state.rho_bar + float(spectrum[-1]),
        t=state.t + 1,
    )


def sketch_stream(contexts, m, lam):
    """Run :func:`fd_update` over the rows of ``contexts``; yields every state."""
    contexts = np.asarray(contexts, dtype=float)
    state = SketchState.empty(m, contexts.shape[1], lam)
    yield state
    for x in contexts:
        state = fd_update(state, x)
        yield state


def inv_apply(state, v):
    """``(S.T S + lam I)^{-1} v`` through the Woodbury form ``(I - S.T H S) v / lam``."""
    v = _check_vector(state, v, "v")
    S = state.S
    return (v - S.T @ (state.H_diag * (S @ v))) / state.lam


def inv_sqrt_apply(state, v, mode=InvSqrtMode.EXACT):
    """Apply ``(S.T S + lam I)^{-1/2}`` to ``v``.

    ``mode="exact"`` uses the spectral form: the sketch eigenbasis gets
    ``(shrunk_i + lam)^{-1/2}`` and its orthogonal complement ``lam^{-1/2}``.
    ``mode="paper"`` evaluates
    ``S'.T (S' S'.T)^{-1} (lam/2 I + S' S'.T)^{-1/2} S' v`` with
    ``S' = (Sigma + (lam/2 - rho) I)^{1/2} U`` literally. That closed form has
    no component outside the row space of ``U``, so it differs from the true
    inverse square root whenever ``v`` has mass off the sketch span.
    """
    v = _check_vector(state, v, "v")
    mode = InvSqrtMode(mode)
    U = state.basis
    coords = U @ v
    if mode is InvSqrtMode.EXACT:
        off_span = v - U.T @ coords
        return off_span / np.sqrt(state.lam) + U.T @ (coords / np.sqrt(state.shrunk + state.lam))
    half = state.lam / 2.0
    row_scale = np.sqrt(state.shrunk + half)
    S_prime = row_scale[:, None] * U
    gram_diag = (S_prime * S_prime).sum(axis=1)
    inner = (S_prime @ v) / np.sqrt(half + gram_diag)
    nz = gram_diag > 0
    inner[nz] /= gram_diag[nz]
    inner[~nz] = 0.0
    return S_prime.T @ inner


def quad_norm(state, x):
    """``||x||`` in the ``(S.T S + lam I)^{-1}`` norm."""
    x = _check_vector(state, x)
    return float(np.sqrt(max(0.0, x @ inv_apply(state, x))))


def quad_norms(state, X):
    """Row-wise :func:`quad_norm` for a ``K x d`` matrix of candidates."""
    X = np.asarray(X, dtype=float)
    S = state.S
    P = X @ S.T
    sq = (np.einsum("ij,ij->i", X, X) - (P * P) @ state.H_diag) / state.lam
    return np.sqrt(np.maximum(sq, 0.0))
