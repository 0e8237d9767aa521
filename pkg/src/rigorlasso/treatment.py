"""Orthogonal-moment treatment effects: ATE, ATET, LATE, LATET.

Outcome regressions are fitted by post-Lasso within treatment (or
instrument) arms; propensities by penalized logistic regression, clipped
to [0.01, 0.99].  Each estimator solves a sample moment exactly, so the
influence values average to zero and analytic standard errors are
sd(influence)/sqrt(n).  Multiplier-bootstrap standard errors are optional.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from .rlasso import PenaltyConfig, predict, rlasso_fit
from .rlassologit import predict_proba, rlassologit_fit
from .simkit import RngStream, draw_multipliers

__all__ = [
    "TreatmentFit",
    "rlasso_ate",
    "rlasso_atet",
    "rlasso_late",
    "rlasso_latet",
    "bootstrap_se",
]

PROPENSITY_CLIP = (0.01, 0.99)
_MIN_ARM = 5
_MIN_COMPLIANCE = 0.01


@dataclass(frozen=True)
class TreatmentFit:
    effect: str  # "ATE" | "ATET" | "LATE" | "LATET"
    alpha_hat: float
    se: float
    t_stat: float
    p_value: float
    influence: np.ndarray
    bootstrap: str = "none"
    boot_draws: np.ndarray | None = None
    nuisances: dict = field(default_factory=dict)

    def confint(self, level: float = 0.95):
        z = float(norm.ppf(1 - (1 - level) / 2))
        return self.alpha_hat - z * self.se, self.alpha_hat + z * self.se


def bootstrap_se(influence, kind: str, nRep: int = 500, rng: RngStream | None = None):
    """Multiplier-bootstrap standard error of a mean-zero influence vector.

    Each draw is E_n[g_i psi_i]; with normal multipliers the draw standard
    deviation converges to sd(psi)/sqrt(n) as nRep grows.
    """
    if nRep < 2:
        raise ValueError("nRep must be >= 2")
    rng = rng or RngStream(0)
    psi = np.asarray(influence, dtype=float)
    n = len(psi)
    draws = np.array(
        [float(np.mean(draw_multipliers(kind, n, rng.child(b)) * psi)) for b in range(nRep)]
    )
    return float(np.std(draws, ddof=1)), draws


def _check_binary(v, name):
    v = np.asarray(v, dtype=float).ravel()
    if not np.all(np.isin(v, (0.0, 1.0))):
        raise ValueError(f"{name} must be binary 0/1")
    return v


def _arm_regression(X, y, arm_mask, cfg, rng):
    """Post-Lasso of y on X within one arm, predicted for all rows."""
    if arm_mask.sum() < _MIN_ARM:
        raise ValueError(f"arm has fewer than {_MIN_ARM} observations")
    fit = rlasso_fit(X[arm_mask], y[arm_mask], cfg, post=True, intercept=True, rng=rng)
    return predict(fit, X), fit


def _propensity(X, d, cfg, rng, kind: str = "logit"):
    """Estimated P(d=1 | x), clipped; constant arms short-circuit to the
    observed share so degenerate reductions stay exact."""
    d = np.asarray(d, dtype=float)
    if d.min() == d.max():
        return np.full(len(d), d[0]), 0
    if kind == "logit":
        fit = rlassologit_fit(X, d, cfg)
        raw = predict_proba(fit, X)
    elif kind == "linear":
        fit = rlasso_fit(X, d, cfg, post=True, intercept=True, rng=rng)
        raw = predict(fit, X)
    else:
        raise ValueError(f"unknown propensity estimator: {kind!r}")
    lo, hi = PROPENSITY_CLIP
    clipped = np.clip(raw, lo, hi)
    n_clipped = int(np.sum((raw < lo) | (raw > hi)))
    if n_clipped > 0.1 * len(d):
        warnings.warn(
            f"propensity clipping affected {n_clipped} of {len(d)} observations",
            stacklevel=3,
        )
    return clipped, n_clipped


def _finalize(effect, alpha_hat, influence, bootstrap_kind, nRep, rng, nuisances):
    n = len(influence)
    if bootstrap_kind == "none":
        se = float(np.std(influence, ddof=0)) / math.sqrt(n)
        draws = None
    else:
        se, draws = bootstrap_se(influence, bootstrap_kind, nRep, rng.child(999))
    t = alpha_hat / se
    return TreatmentFit(
        effect=effect,
        alpha_hat=float(alpha_hat),
        se=se,
        t_stat=float(t),
        p_value=float(2 * (1 - norm.cdf(abs(t)))),
        influence=influence,
        bootstrap=bootstrap_kind,
        boot_draws=draws,
        nuisances=nuisances,
    )


def rlasso_ate(
    x,
    d,
    y,
    cfg: PenaltyConfig | None = None,
    bootstrap_kind: str = "none",
    nRep: int = 500,
    rng: RngStream | None = None,
    propensity: str = "logit",
) -> TreatmentFit:
    """Average treatment effect via the augmented inverse-propensity score."""
    cfg = cfg or PenaltyConfig()
    rng = rng or RngStream(0)
    X = np.asarray(x, dtype=float)
    d = _check_binary(d, "treatment")
    y = np.asarray(y, dtype=float).ravel()
    treated = d == 1

    g1, fit1 = _arm_regression(X, y, treated, cfg, rng.child(1))
    g0, fit0 = _arm_regression(X, y, ~treated, cfg, rng.child(2))
    m, n_clip = _propensity(X, d, cfg, rng.child(3), propensity)

    integrand = g1 - g0 + d * (y - g1) / m - (1 - d) * (y - g0) / (1 - m)
    alpha_hat = float(np.mean(integrand))
    influence = integrand - alpha_hat
    nuis = {"outcome_treated": fit1, "outcome_control": fit0, "clipped": n_clip}
    return _finalize("ATE", alpha_hat, influence, bootstrap_kind, nRep, rng, nuis)


def rlasso_atet(
    x,
    d,
    y,
    cfg: PenaltyConfig | None = None,
    bootstrap_kind: str = "none",
    nRep: int = 500,
    rng: RngStream | None = None,
    propensity: str = "logit",
) -> TreatmentFit:
    """Average treatment effect on the treated."""
    cfg = cfg or PenaltyConfig()
    rng = rng or RngStream(0)
    X = np.asarray(x, dtype=float)
    d = _check_binary(d, "treatment")
    y = np.asarray(y, dtype=float).ravel()
    treated = d == 1
    if treated.all() or not treated.any():
        raise ValueError("both treatment arms must be present")

    g0, fit0 = _arm_regression(X, y, ~treated, cfg, rng.child(2))
    m, n_clip = _propensity(X, d, cfg, rng.child(3), propensity)

    p_treated = float(np.mean(d))
    integrand = d * (y - g0) - m * (1 - d) * (y - g0) / (1 - m)
    alpha_hat = float(np.mean(integrand)) / p_treated
    influence = (integrand - alpha_hat * d) / p_treated
    nuis = {"outcome_control": fit0, "clipped": n_clip}
    return _finalize("ATET", alpha_hat, influence, bootstrap_kind, nRep, rng, nuis)


def _late_pieces(x, d, y, z, cfg, rng, propensity):
    X = np.asarray(x, dtype=float)
    d = _check_binary(d, "treatment")
    z = _check_binary(z, "instrument")
    y = np.asarray(y, dtype=float).ravel()
    z1 = z == 1
    if z1.all() or not z1.any():
        raise ValueError("both instrument arms must be present")

    mu1, _ = _arm_regression(X, y, z1, cfg, rng.child(1))
    mu0, _ = _arm_regression(X, y, ~z1, cfg, rng.child(2))
    # Treatment propensities are fitted within each instrument arm but
    # evaluated for every observation.
    m1_full = _propensity_full(X, d, z1, cfg, rng.child(3), propensity)
    m0_full = _propensity_full(X, d, ~z1, cfg, rng.child(4), propensity)
    p_z, n_clip = _propensity(X, z, cfg, rng.child(5), propensity)
    return X, d, y, z, mu1, mu0, m1_full, m0_full, p_z, n_clip


def _propensity_full(X, d, arm_mask, cfg, rng, kind):
    """Propensity fitted within an arm, evaluated for every observation."""
    sub = d[arm_mask]
    if sub.min() == sub.max():
        return np.full(X.shape[0], sub[0])
    if kind == "logit":
        fit = rlassologit_fit(X[arm_mask], sub, cfg)
        raw = predict_proba(fit, X)
    else:
        fit = rlasso_fit(X[arm_mask], sub, cfg, post=True, intercept=True, rng=rng)
        raw = predict(fit, X)
    return np.clip(raw, *PROPENSITY_CLIP)


def rlasso_late(
    x,
    d,
    y,
    z,
    cfg: PenaltyConfig | None = None,
    bootstrap_kind: str = "none",
    nRep: int = 500,
    rng: RngStream | None = None,
    propensity: str = "logit",
) -> TreatmentFit:
    """Local average treatment effect for compliers of a binary instrument."""
    cfg = cfg or PenaltyConfig()
    rng = rng or RngStream(0)
    X, d, y, z, mu1, mu0, m1, m0, p_z, n_clip = _late_pieces(x, d, y, z, cfg, rng, propensity)

    num = mu1 - mu0 + z * (y - mu1) / p_z - (1 - z) * (y - mu0) / (1 - p_z)
    den = m1 - m0 + z * (d - m1) / p_z - (1 - z) * (d - m0) / (1 - p_z)
    den_mean = float(np.mean(den))
    if abs(den_mean) < _MIN_COMPLIANCE:
        raise ValueError("no compliers detected: compliance moment near zero")
    alpha_hat = float(np.mean(num)) / den_mean
    influence = (num - alpha_hat * den) / den_mean
    nuis = {"clipped": n_clip}
    return _finalize("LATE", alpha_hat, influence, bootstrap_kind, nRep, rng, nuis)


def rlasso_latet(
    x,
    d,
    y,
    z,
    cfg: PenaltyConfig | None = None,
    bootstrap_kind: str = "none",
    nRep: int = 500,
    rng: RngStream | None = None,
    propensity: str = "logit",
) -> TreatmentFit:
    """Local average treatment effect for treated compliers.

    Weighting mirrors the ATET construction: the z=0 arm is reweighted by
    the instrument propensity, and the normalization by P(Z=1) cancels in
    the moment ratio.
    """
    cfg = cfg or PenaltyConfig()
    rng = rng or RngStream(0)
    X, d, y, z, mu1, mu0, m1, m0, p_z, n_clip = _late_pieces(x, d, y, z, cfg, rng, propensity)

    num = z * (y - mu0) - p_z * (1 - z) * (y - mu0) / (1 - p_z)
    den = z * (d - m0) - p_z * (1 - z) * (d - m0) / (1 - p_z)
    den_mean = float(np.mean(den))
    if abs(den_mean) < _MIN_COMPLIANCE:
        raise ValueError("no treated compliers detected: compliance moment near zero")
    alpha_hat = float(np.mean(num)) / den_mean
    influence = (num - alpha_hat * den) / den_mean
    nuis = {"clipped": n_clip}
    return _finalize("LATET", alpha_hat, influence, bootstrap_kind, nRep, rng, nuis)
