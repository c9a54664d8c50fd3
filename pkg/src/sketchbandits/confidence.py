"""Confidence radii and spectral diagnostics for (sketched) linear bandits."""

import math
from dataclasses import asdict, dataclass

import numpy as np

# P(N(0, 1) >= 1): anti-concentration constant of the standard Gaussian
GAUSSIAN_TS_P = 0.15865525393145707


@dataclass(frozen=True)
class ConfidenceConfig:
    """Problem constants shared by every radius formula.

    ``ts_p``, ``ts_c`` and ``ts_cprime`` describe the perturbation law used by
    Thompson sampling; the defaults correspond to ``N(0, I_d)``.
    """

    d: int
    m: int
    lam: float = 1.0
    L: float = 1.0
    S_bound: float = 1.0
    R: float = 1.0
    delta: float = 0.05
    horizon: int = 1000
    ts_p: float = GAUSSIAN_TS_P
    ts_c: float = 2.0
    ts_cprime: float = 2.0

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"d must be >= 1, got {self.d}")
        if not 1 <= self.m <= self.d:
            raise ValueError(f"m must satisfy 1 <= m <= d, got m={self.m}, d={self.d}")
        for name in ("lam", "L", "ts_p", "ts_c", "ts_cprime"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.S_bound < 0 or self.R < 0:
            raise ValueError("S_bound and R must be non-negative")
        # delta = 1 is accepted as the degenerate case where log(1/delta) = 0
        if not 0 < self.delta <= 1:
            raise ValueError(f"delta must lie in (0, 1], got {self.delta}")
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")

    @property
    def ts_delta(self):
        """Per-round confidence ``delta / (4 T)`` used by Thompson sampling."""
        return self.delta / (4.0 * self.horizon)

    def replace(self, **changes):
        return ConfidenceConfig(**{**asdict(self), **changes})


def _delta(cfg, delta):
    delta = cfg.delta if delta is None else delta
    if not 0 < delta <= 1:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    return delta


def beta_oful(cfg, t, delta=None):
    """Radius of the exact RLS confidence ellipsoid after ``t`` rounds."""
    if t < 0:
        raise ValueError("t must be non-negative")
    delta = _delta(cfg, delta)
    d, lam = cfg.d, cfg.lam
    inner = d * math.log1p(t * cfg.L**2 / (lam * d)) + 2.0 * math.log(1.0 / delta)
    return cfg.R * math.sqrt(inner) + cfg.S_bound * math.sqrt(lam)


def beta_sketched(cfg, t, rho_bar, delta=None):
    """Radius of the sketched confidence ellipsoid given cumulative shrinkage ``rho_bar``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    if rho_bar < 0:
        raise ValueError(f"rho_bar must be non-negative, got {rho_bar}")
    delta = _delta(cfg, delta)
    d, m, lam = cfg.d, cfg.m, cfg.lam
    blowup = 1.0 + rho_bar / lam
    inner = (
        m * math.log1p(t * cfg.L**2 / (m * lam))
        + 2.0 * math.log(1.0 / delta)
        + d * math.log(blowup)
    )
    return cfg.R * math.sqrt(inner) * math.sqrt(blowup) + cfg.S_bound * math.sqrt(lam) * blowup


def ts_envelope(cfg, delta=None):
    """Norm bound ``sqrt(c d ln(c' d / delta))`` of the TS perturbation."""
    delta = _delta(cfg, delta)
    arg = cfg.ts_cprime * cfg.d / delta
    if arg <= 1:
        raise ValueError(f"c' d / delta must exceed 1, got {arg}")
    return math.sqrt(cfg.ts_c * cfg.d * math.log(arg))


def gamma_sketched(cfg, t, rho_bar, delta=None):
    """TS confidence radius: ``beta_sketched`` inflated by the perturbation envelope."""
    return beta_sketched(cfg, t, rho_bar, delta) * ts_envelope(cfg, delta)


def _check_spectrum(eigenvalues):
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    if eigenvalues.ndim != 1 or eigenvalues.size == 0:
        raise ValueError("eigenvalues must be a non-empty 1-d sequence")
    if np.any(np.diff(eigenvalues) > 1e-12 * (1.0 + abs(eigenvalues[0]))):
        raise ValueError("eigenvalues must be sorted in descending order")
    return np.maximum(eigenvalues, 0.0)


def spectral_error(eigenvalues, lam, m):
    """Spectral error read literally: ``min_k sum(last k+1 eigenvalues) / (lam (m - k))``.

    ``k`` ranges over ``0 .. m-1`` and the ``k`` term sums the ``k + 1``
    smallest eigenvalues.
    """
    lam_ = _check_spectrum(eigenvalues)
    d = lam_.size
    if not 1 <= m <= d:
        raise ValueError(f"m must satisfy 1 <= m <= d, got m={m}, d={d}")
    tails = np.cumsum(lam_[::-1])[:m]
    k = np.arange(m)
    return float(np.min(tails / (lam * (m - k))))


def spectral_error_tail(eigenvalues, lam, m):
    """Tail-sum upper form ``(lambda_m + ... + lambda_d) / lam`` of the spectral error."""
    lam_ = _check_spectrum(eigenvalues)
    if not 1 <= m <= lam_.size:
        raise ValueError(f"m must satisfy 1 <= m <= d, got m={m}, d={lam_.size}")
    return float(lam_[m - 1:].sum() / lam)


def effective_dimension(cfg, eps_m):
    """``m + d ln(1 + eps_m)``."""
    return cfg.m + cfg.d * math.log1p(eps_m)


def leverage_bound_rhs(cfg, eps_m, T):
    """Upper bound on ``sum_t min(1, ||x_t||^2)`` in the sketched inverse norm."""
    if eps_m < 0:
        raise ValueError("eps_m must be non-negative")
    m_tilde = effective_dimension(cfg, eps_m)
    return 2.0 * (1.0 + eps_m) * (m_tilde + cfg.m * math.log1p(T * cfg.L**2 / (cfg.m * cfg.lam)))


def det_trace_rhs(cfg, t, rho_bar):
    """Upper bound on ``ln det(V_t / lam)`` for a sketch with shrinkage ``rho_bar``."""
    if rho_bar < 0:
        raise ValueError("rho_bar must be non-negative")
    return cfg.d * math.log1p(rho_bar / cfg.lam) + cfg.m * math.log1p(
        t * cfg.L**2 / (cfg.m * cfg.lam)
    )
