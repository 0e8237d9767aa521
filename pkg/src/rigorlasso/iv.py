"""Instrumental-variables estimation with optional Lasso selection.

Four regimes: classical 2SLS (no selection), selection on the instruments
(select_z), selection on the controls (select_x), and selection on both
(select_xz).  All standard errors are heteroskedasticity-robust (HC0).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .rlasso import PenaltyConfig, RlassoFit, predict, rlasso_fit
from .simkit import RngStream

__all__ = [
    "IvFit",
    "tsls",
    "rlasso_iv_select_z",
    "rlasso_iv_select_x",
    "rlasso_iv_select_xz",
]


@dataclass(frozen=True)
class IvFit:
    alpha_hat: float
    se: float
    t_stat: float
    p_value: float
    regime: str  # "none" | "select_z" | "select_x" | "select_xz"
    selected_x: tuple = ()
    selected_z: tuple = ()
    first_stage: RlassoFit | None = None
    endog_coefficients: tuple = ()  # all endogenous coefficients for tsls

    def confint(self, level: float = 0.95):
        z = float(norm.ppf(1 - (1 - level) / 2))
        return self.alpha_hat - z * self.se, self.alpha_hat + z * self.se


def _as_matrix(a):
    if a is None:
        return None
    a = np.asarray(a, dtype=float)
    return a[:, None] if a.ndim == 1 else a


def _iv_fit(regime, alpha_hat, se, **extra) -> IvFit:
    t = alpha_hat / se
    return IvFit(
        alpha_hat=float(alpha_hat),
        se=float(se),
        t_stat=float(t),
        p_value=float(2 * (1 - norm.cdf(abs(t)))),
        regime=regime,
        **extra,
    )


def tsls(y, d, x, z, intercept: bool = True) -> IvFit:
    """Classical two-stage least squares of y on endogenous d with
    instruments z and included exogenous controls x."""
    y = np.asarray(y, dtype=float).ravel()
    D_en = _as_matrix(d)
    X = _as_matrix(x)
    Z_ex = _as_matrix(z)
    n = len(y)
    if Z_ex is None or D_en is None:
        raise ValueError("both endogenous regressors and instruments are required")
    if Z_ex.shape[1] < D_en.shape[1]:
        raise ValueError("order condition violated: fewer instruments than endogenous")

    blocks_D = [D_en] + ([X] if X is not None and X.size else [])
    blocks_Z = [Z_ex] + ([X] if X is not None and X.size else [])
    if intercept:
        ones = np.ones((n, 1))
        blocks_D.append(ones)
        blocks_Z.append(ones)
    D = np.hstack(blocks_D)
    Z = np.hstack(blocks_Z)

    ZtZ = Z.T @ Z
    if np.linalg.matrix_rank(ZtZ) < Z.shape[1]:
        raise ValueError("instrument matrix is rank deficient")
    Dhat = Z @ np.linalg.solve(ZtZ, Z.T @ D)
    DhD = Dhat.T @ D
    if np.linalg.matrix_rank(DhD) < D.shape[1]:
        raise ValueError("projected design is rank deficient")
    coef = np.linalg.solve(DhD, Dhat.T @ y)
    resid = y - D @ coef

    bread = np.linalg.inv(DhD)
    meat = (Dhat * (resid * resid)[:, None]).T @ Dhat
    V = bread @ meat @ bread.T
    kd = D_en.shape[1]
    return _iv_fit(
        "none",
        coef[0],
        math.sqrt(V[0, 0]),
        endog_coefficients=tuple(float(c) for c in coef[:kd]),
    )


def rlasso_iv_select_z(x, d, y, z, cfg: PenaltyConfig | None = None, rng: RngStream | None = None) -> IvFit:
    """Lasso-select instruments: post-Lasso of d on (z, x) with x forced in,
    then 2SLS using the first-stage fitted value as the instrument."""
    cfg = cfg or PenaltyConfig()
    rng = rng or RngStream(0)
    X = _as_matrix(x)
    Z = _as_matrix(z)
    d = np.asarray(d, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    W = np.hstack([Z, X]) if X is not None and X.size else Z
    pz = Z.shape[1]
    forced = tuple(range(pz, W.shape[1]))
    first = rlasso_fit(W, d, cfg, post=True, intercept=True, rng=rng.child(1), penalty_free=forced)
    selected_z = tuple(int(j) for j in first.support if j < pz)
    if not selected_z:
        raise ValueError("identification lost: empty instrument selection")
    dhat = predict(first, W)
    fit = tsls(y, d, X, dhat, intercept=True)
    return _iv_fit(
        "select_z",
        fit.alpha_hat,
        fit.se,
        selected_z=selected_z,
        first_stage=first,
    )


def rlasso_iv_select_x(x, d, y, z, cfg: PenaltyConfig | None = None, rng: RngStream | None = None) -> IvFit:
    """Lasso-select controls: partial x out of y, d, and each instrument by
    post-Lasso, then 2SLS on the residuals without intercept."""
    cfg = cfg or PenaltyConfig()
    rng = rng or RngStream(0)
    X = _as_matrix(x)
    Z = _as_matrix(z)
    d = np.asarray(d, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if X is None or not X.size:
        return tsls(y, d, None, Z, intercept=True)

    fit_y = rlasso_fit(X, y, cfg, post=True, intercept=True, rng=rng.child(1))
    fit_d = rlasso_fit(X, d, cfg, post=True, intercept=True, rng=rng.child(2))
    rz_cols = []
    for k in range(Z.shape[1]):
        fit_z = rlasso_fit(X, Z[:, k], cfg, post=True, intercept=True, rng=rng.child(3 + k))
        rz_cols.append(fit_z.residuals)
    ry, rd = fit_y.residuals, fit_d.residuals
    rZ = np.column_stack(rz_cols)

    first_stage_cov = np.abs(rZ.T @ rd) / len(d)
    if float(np.max(first_stage_cov)) < 1e-6:
        warnings.warn("weak first stage: residualized instruments barely move the target", stacklevel=2)
    fit = tsls(ry, rd, None, rZ, intercept=False)
    selected_x = tuple(int(j) for j in np.union1d(fit_y.support, fit_d.support))
    return _iv_fit("select_x", fit.alpha_hat, fit.se, selected_x=selected_x)


def rlasso_iv_select_xz(x, d, y, z, cfg: PenaltyConfig | None = None, rng: RngStream | None = None) -> IvFit:
    """Selection on both controls and instruments.

    The first stage predicts d from (x, z); the prediction is then
    residualized on x alongside y and d, and the residualized prediction
    serves as the single instrument in a no-intercept 2SLS.
    """
    cfg = cfg or PenaltyConfig()
    rng = rng or RngStream(0)
    X = _as_matrix(x)
    Z = _as_matrix(z)
    if X is None or not X.size or Z is None or not Z.size:
        raise ValueError("select_xz needs nonempty controls and instruments")
    d = np.asarray(d, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()

    W = np.hstack([X, Z])
    px = X.shape[1]
    first = rlasso_fit(W, d, cfg, post=True, intercept=True, rng=rng.child(1))
    selected_z = tuple(int(j) - px for j in first.support if j >= px)
    if first.support.size == 0:
        raise ValueError("identification lost: empty first-stage selection")
    dhat = predict(first, W)

    fit_y = rlasso_fit(X, y, cfg, post=True, intercept=True, rng=rng.child(2))
    fit_d = rlasso_fit(X, d, cfg, post=True, intercept=True, rng=rng.child(3))
    fit_dhat = rlasso_fit(X, dhat, cfg, post=True, intercept=True, rng=rng.child(4))
    fit = tsls(fit_y.residuals, fit_d.residuals, None, fit_dhat.residuals, intercept=False)
    selected_x = tuple(int(j) for j in np.union1d(fit_y.support, fit_d.support))
    return _iv_fit(
        "select_xz",
        fit.alpha_hat,
        fit.se,
        selected_x=selected_x,
        selected_z=selected_z,
        first_stage=first,
    )
