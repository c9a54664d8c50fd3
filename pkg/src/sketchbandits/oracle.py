"""Brute-force references for the sketch and the confidence bounds.

The checkers rebuild every left-hand side with dense ``d x d`` algebra
(explicit correlation matrices, ``numpy.linalg.eigvalsh``, ``slogdet`` and
``solve``) and compare it with the closed-form right-hand sides from
:mod:`sketchbandits.confidence`. None of them goes through the Woodbury or
Sherman-Morrison fast paths.
"""

import json
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .confidence import (
    beta_sketched,
    det_trace_rhs,
    leverage_bound_rhs,
    spectral_error,
    spectral_error_tail,
)
from .environments import synth_generate
from .harness import play
from .policies import Policy, PolicyKind
from .sketch import sketch_stream

TOL = 1e-8


def _tol(*magnitudes):
    return TOL * (1.0 + max(abs(float(v)) for v in magnitudes))


@dataclass
class LemmaReport:
    """Outcome of one inequality check.

    ``slack`` is the tightest margin seen (RHS - LHS, or for PSD checks the
    most negative eigenvalue distance to the allowed interval); negative means
    the inequality was violated by that much before tolerance.
    """

    lemma: str
    rounds: int
    slack: float
    passed: bool
    details: dict = field(default_factory=dict)

    def to_json(self):
        return json.dumps(asdict(self), indent=2, default=float)

    def __str__(self):
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.lemma}: rounds={self.rounds} slack={self.slack:.3e}"


def dense_v_track(contexts, lam):
    """Yield ``(V_t, V_t^{-1}, eig(X_t.T X_t))`` for ``t = 0..T`` by direct computation."""
    contexts = np.asarray(contexts, dtype=float)
    d = contexts.shape[1]
    G = np.zeros((d, d))
    for t in range(contexts.shape[0] + 1):
        if t:
            x = contexts[t - 1]
            G = G + np.outer(x, x)
        V = G + lam * np.eye(d)
        yield V, np.linalg.inv(V), np.sort(np.linalg.eigvalsh(G))[::-1]


def gram_eigenvalues(contexts):
    contexts = np.asarray(contexts, dtype=float)
    return np.sort(np.linalg.eigvalsh(contexts.T @ contexts))[::-1]


def check_fd_sandwich(contexts, m, lam=1.0):
    """``0 <= X.T X - S.T S <= rho_bar I`` in the PSD order, every round."""
    contexts = np.asarray(contexts, dtype=float)
    d = contexts.shape[1]
    G = np.zeros((d, d))
    slack, ok = np.inf, True
    last = {}
    for t, state in enumerate(sketch_stream(contexts, m, lam)):
        if t:
            G += np.outer(contexts[t - 1], contexts[t - 1])
        S = state.S
        diff = G - S.T @ S
        ev = np.linalg.eigvalsh((diff + diff.T) / 2.0)
        tol = TOL * (1.0 + np.trace(G))
        margin = min(ev[0], state.rho_bar - ev[-1])
        slack = min(slack, margin)
        ok &= margin >= -tol
        last = {"rho_bar": state.rho_bar, "diff_eigenvalues": ev[::-1].tolist()}
    return LemmaReport("fd_sandwich", contexts.shape[0], float(slack), bool(ok), last)


def check_prop_ve(contexts, m, lam=1.0):
    """``rho_bar_t / lam`` against the spectral error of the full stream.

    Pass/fail uses the tail-sum form ``(lambda_m + ... + lambda_d) / lam``;
    the literal minimum-over-k reading is reported alongside, with its own
    flag, because it can fail on valid sketches.
    """
    contexts = np.asarray(contexts, dtype=float)
    eig = gram_eigenvalues(contexts)
    eps_literal = spectral_error(eig, lam, m)
    eps_tail = spectral_error_tail(eig, lam, m)
    rho = max(s.rho_bar for s in sketch_stream(contexts, m, lam)) / lam
    slack = eps_tail - rho
    passed = slack >= -_tol(eps_tail, rho)
    return LemmaReport(
        "prop_ve",
        contexts.shape[0],
        float(slack),
        bool(passed),
        {
            "rho_bar_over_lambda": rho,
            "eps_tail": eps_tail,
            "eps_literal": eps_literal,
            "literal_holds": bool(rho <= eps_literal + _tol(eps_literal, rho)),
        },
    )


def check_leverage(contexts, quad_norms, cfg):
    """Sum of capped sketched leverage scores of a logged run against its bound.

    ``quad_norms[t]`` is ``||x_t||`` in the sketched inverse norm *before*
    ``x_t`` was absorbed, as logged by the harness. The spectral error is the
    tail-sum form computed from the chosen contexts.
    """
    contexts = np.asarray(contexts, dtype=float)
    q = np.asarray(quad_norms, dtype=float)
    T = q.shape[0]
    lhs = float(np.minimum(1.0, q**2).sum())
    eps = spectral_error_tail(gram_eigenvalues(contexts), cfg.lam, cfg.m) if T else 0.0
    rhs = leverage_bound_rhs(cfg, eps, T)
    return LemmaReport(
        "leverage",
        T,
        rhs - lhs,
        bool(lhs <= rhs + _tol(rhs)),
        {"lhs": lhs, "rhs": rhs, "eps_m": eps},
    )


def check_det_trace(contexts, cfg):
    """``ln det(V_t / lam) <= d ln(1 + rho_bar_t / lam) + m ln(1 + t L^2 / (m lam))``."""
    contexts = np.asarray(contexts, dtype=float)
    slack, ok, worst = np.inf, True, {}
    pairs = zip(dense_v_track(contexts, cfg.lam), sketch_stream(contexts, cfg.m, cfg.lam))
    for t, ((V, _, _), state) in enumerate(pairs):
        _, logdet = np.linalg.slogdet(V / cfg.lam)
        rhs = det_trace_rhs(cfg, t, state.rho_bar)
        margin = rhs - logdet
        ok &= margin >= -_tol(rhs, logdet)
        if margin < slack:
            slack, worst = margin, {"t": t, "lhs": float(logdet), "rhs": rhs}
    return LemmaReport("det_trace", contexts.shape[0], float(slack), bool(ok), worst)


@dataclass
class CoverageReport:
    runs: int
    covered: int
    target: float
    radius_scale: float

    @property
    def rate(self):
        return self.covered / self.runs

    def to_json(self):
        return {**asdict(self), "rate": self.rate}


def _ellipsoid_holds(contexts, rewards, w_star, cfg, m, radius_scale):
    """Whether ``||w_tilde_t - w_star||_{V~_t} <= scale * beta~_t`` for every t, densely."""
    d = contexts.shape[1]
    b = np.zeros(d)
    for t, state in enumerate(sketch_stream(contexts, m, cfg.lam)):
        if t:
            b += rewards[t - 1] * contexts[t - 1]
        S = state.S
        Vt = S.T @ S + cfg.lam * np.eye(d)
        err = np.linalg.solve(Vt, b) - w_star
        dist = np.sqrt(max(err @ Vt @ err, 0.0))
        if dist > radius_scale * beta_sketched(cfg, t, state.rho_bar):
            return False
    return True


def coverage_mc(cfg, env_spec, runs=500, radius_scale=1.0, seed=0, beta_mult=1.0):
    """Fraction of SOFUL runs whose sketched confidence ellipsoid contains ``w_star`` at every round."""
    covered = 0
    for r in range(runs):
        spec = replace(env_spec, seed=seed * 1_000_003 + r, horizon=cfg.horizon)
        stream = synth_generate(spec)
        policy = Policy(PolicyKind.SOFUL, cfg, beta_mult=beta_mult)
        res = play(stream, policy, timing=False)
        ok = _ellipsoid_holds(res.actions, res.reward, stream.w_star, cfg, cfg.m, radius_scale)
        covered += ok
    return CoverageReport(runs=runs, covered=covered, target=1.0 - cfg.delta, radius_scale=radius_scale)
