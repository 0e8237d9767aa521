"""Orthogonal inference on target coefficients.

Two first-order equivalent estimators are provided: partialling out
(residual-on-residual regression after Lasso partialling) and double
selection (OLS on the target plus the union of controls selected for the
outcome and for the target).  Multi-target batches share an influence
matrix from which pointwise and simultaneous (multiplier bootstrap)
confidence bands are built.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .rlasso import PenaltyConfig, rlasso_fit
from .simkit import RngStream, draw_multipliers

__all__ = [
    "EffectEstimate",
    "EffectsSet",
    "ConfidenceBand",
    "partialling_out_effect",
    "double_selection_effect",
    "effects_batch",
    "confidence_band",
]

_MIN_RESIDUAL_VARIATION = 1e-10


@dataclass(frozen=True)
class EffectEstimate:
    target_name: str
    alpha_hat: float
    se: float
    t_stat: float
    p_value: float
    method: str  # "partialling_out" | "double_selection"
    residual_y: np.ndarray
    residual_d: np.ndarray

    @property
    def influence(self) -> np.ndarray:
        """Per-observation score normalized so its mean estimates alpha - alpha0."""
        rd = self.residual_d
        return rd * (self.residual_y - self.alpha_hat * rd) / np.mean(rd * rd)

    def confint(self, level: float = 0.95):
        z = float(norm.ppf(1 - (1 - level) / 2))
        return self.alpha_hat - z * self.se, self.alpha_hat + z * self.se


@dataclass(frozen=True)
class EffectsSet:
    estimates: tuple  # of EffectEstimate
    influence: np.ndarray  # n x k
    failures: tuple = ()  # (target_name, message) pairs

    @property
    def n(self) -> int:
        return self.influence.shape[0]

    @property
    def k(self) -> int:
        return self.influence.shape[1]

    def alpha_hats(self) -> np.ndarray:
        return np.array([e.alpha_hat for e in self.estimates])

    def standard_errors(self) -> np.ndarray:
        return np.array([e.se for e in self.estimates])


@dataclass(frozen=True)
class ConfidenceBand:
    level: float
    joint: bool
    lower: np.ndarray
    upper: np.ndarray
    critical_value: float


def _finalize(name, method, alpha_hat, se, ry, rd) -> EffectEstimate:
    t = alpha_hat / se
    return EffectEstimate(
        target_name=name,
        alpha_hat=float(alpha_hat),
        se=float(se),
        t_stat=float(t),
        p_value=float(2 * (1 - norm.cdf(abs(t)))),
        method=method,
        residual_y=ry,
        residual_d=rd,
    )


def partialling_out_effect(
    X_controls,
    y,
    d,
    cfg: PenaltyConfig | None = None,
    rng: RngStream | None = None,
    target_name: str = "d",
) -> EffectEstimate:
    """Residual-on-residual estimate of the coefficient on d.

    Both y and d are partialled out on the controls by post-Lasso; the
    slope of the y-residuals on the d-residuals is the estimate, with a
    heteroskedasticity-robust standard error from the orthogonal score.
    """
    cfg = cfg or PenaltyConfig()
    rng = rng or RngStream(0)
    y = np.asarray(y, dtype=float).ravel()
    d = np.asarray(d, dtype=float).ravel()
    fit_y = rlasso_fit(X_controls, y, cfg, post=True, intercept=True, rng=rng.child(1))
    fit_d = rlasso_fit(X_controls, d, cfg, post=True, intercept=True, rng=rng.child(2))
    ry, rd = fit_y.residuals, fit_d.residuals
    n = len(y)
    denom = float(np.mean(rd * rd))
    if denom < _MIN_RESIDUAL_VARIATION:
        raise ValueError("no residual variation in target after partialling out")
    alpha_hat = float(np.mean(ry * rd)) / denom
    eps = ry - alpha_hat * rd
    se = math.sqrt(float(np.mean(eps * eps * rd * rd)) / (n * denom * denom))
    # degrees-of-freedom correction: the residuals absorbed the selected
    # controls, the intercept, and the target slope
    used = int(np.union1d(fit_y.support, fit_d.support).size) + 2
    if n > used:
        se *= math.sqrt(n / (n - used))
    return _finalize(target_name, "partialling_out", alpha_hat, se, ry, rd)


def _hc_sandwich(Z, resid, hc1: bool = False) -> np.ndarray:
    """Heteroskedasticity-robust covariance of OLS coefficients."""
    n, k = Z.shape
    bread = np.linalg.inv(Z.T @ Z)
    meat = (Z * (resid * resid)[:, None]).T @ Z
    V = bread @ meat @ bread
    if hc1:
        V *= n / (n - k)
    return V


def double_selection_effect(
    X_controls,
    y,
    d,
    cfg: PenaltyConfig | None = None,
    rng: RngStream | None = None,
    target_name: str = "d",
    hc1: bool = False,
) -> EffectEstimate:
    """Double-selection estimate: OLS of y on d plus the union of controls
    selected by Lasso for y and for d."""
    cfg = cfg or PenaltyConfig()
    rng = rng or RngStream(0)
    X_controls = np.asarray(X_controls, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    d = np.asarray(d, dtype=float).ravel()
    n = len(y)
    fit_y = rlasso_fit(X_controls, y, cfg, post=True, intercept=True, rng=rng.child(1))
    fit_d = rlasso_fit(X_controls, d, cfg, post=True, intercept=True, rng=rng.child(2))
    union = np.union1d(fit_y.support, fit_d.support).astype(int)
    if union.size + 2 >= n:
        raise ValueError("union support too large for OLS")

    W = np.column_stack([np.ones(n), X_controls[:, union]])
    # FWL residuals give the same d coefficient as the joint OLS and carry
    # over to the influence-function representation used for joint bands.
    proj = np.linalg.lstsq(W, np.column_stack([y, d]), rcond=None)[0]
    ry = y - W @ proj[:, 0]
    rd = d - W @ proj[:, 1]
    denom = float(np.mean(rd * rd))
    if denom < _MIN_RESIDUAL_VARIATION:
        raise ValueError("no residual variation in target after selection")
    alpha_hat = float(np.mean(ry * rd)) / denom

    Z = np.column_stack([d, W])
    coef = np.linalg.lstsq(Z, y, rcond=None)[0]
    resid = y - Z @ coef
    V = _hc_sandwich(Z, resid, hc1=hc1)
    se = math.sqrt(V[0, 0])
    return _finalize(target_name, "double_selection", alpha_hat, se, ry, rd)


def effects_batch(
    X,
    y,
    target_indices,
    method: str = "partialling_out",
    cfg: PenaltyConfig | None = None,
    rng: RngStream | None = None,
    column_names=None,
) -> EffectsSet:
    """Run single-target inference for each listed column of X in turn.

    For target j all remaining columns (other targets included) act as
    controls.  Per-target failures are collected and reported without
    aborting the batch.
    """
    estimators = {
        "partialling_out": partialling_out_effect,
        "double_selection": double_selection_effect,
    }
    if method not in estimators:
        raise ValueError(f"unknown method: {method!r}")
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    n, p = X.shape
    targets = list(target_indices)
    if len(set(targets)) != len(targets):
        raise ValueError("target indices must be distinct")
    names = list(column_names) if column_names is not None else [f"X{j + 1}" for j in range(p)]

    cfg = cfg or PenaltyConfig()
    rng = rng or RngStream(0)
    estimates, influence_cols, failures = [], [], []
    for pos, j in enumerate(targets):
        if not 0 <= j < p:
            raise ValueError(f"target index {j} out of range")
        controls = np.delete(X, j, axis=1)
        try:
            est = estimators[method](
                controls, y, X[:, j], cfg, rng.child(pos), target_name=names[j]
            )
        except ValueError as exc:
            failures.append((names[j], str(exc)))
            continue
        estimates.append(est)
        influence_cols.append(est.influence)
    influence = np.column_stack(influence_cols) if influence_cols else np.empty((n, 0))
    return EffectsSet(estimates=tuple(estimates), influence=influence, failures=tuple(failures))


def confidence_band(
    es: EffectsSet,
    level: float = 0.95,
    joint: bool = False,
    num_boot: int = 1000,
    multiplier_kind: str = "normal",
    rng: RngStream | None = None,
) -> ConfidenceBand:
    """Pointwise normal or simultaneous multiplier-bootstrap intervals.

    The joint band bootstraps the sup-t statistic over the influence
    columns, studentized by each column's empirical standard deviation,
    and widens every interval by the common simulated critical value.
    """
    if not 0 < level < 1:
        raise ValueError("level must lie in (0, 1)")
    if es.k == 0:
        raise ValueError("no successful estimates to band")
    alpha_hat = es.alpha_hats()
    se = es.standard_errors()
    if not joint:
        z = float(norm.ppf(1 - (1 - level) / 2))
        return ConfidenceBand(level, False, alpha_hat - z * se, alpha_hat + z * se, z)

    if num_boot < 100:
        warnings.warn("num_boot below 100 gives a noisy joint critical value", stacklevel=2)
    rng = rng or RngStream(0)
    n, k = es.n, es.k
    phi = es.influence - es.influence.mean(axis=0)
    s_hat = phi.std(axis=0) / math.sqrt(n)  # scale of E_n[g phi_j]
    gen_stream = rng
    draws = np.empty(num_boot)
    done = 0
    while done < num_boot:
        block = min(256, num_boot - done)
        G = np.column_stack(
            [
                draw_multipliers(multiplier_kind, n, gen_stream.child(done + b))
                for b in range(block)
            ]
        )
        stats = np.abs(phi.T @ G) / n / s_hat[:, None]
        draws[done : done + block] = stats.max(axis=0)
        done += block
    order = min(max(int(math.ceil(num_boot * level)), 1), num_boot)
    critical = float(np.partition(draws, order - 1)[order - 1])
    return ConfidenceBand(level, True, alpha_hat - critical * se, alpha_hat + critical * se, critical)
