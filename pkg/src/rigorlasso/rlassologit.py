"""Penalized logistic regression with a fixed, theory-based penalty.

Used mainly as the propensity estimator for the treatment-effect module.
The penalty level is lambda = (c/2) sqrt(n) Phi^-1(1 - gamma/(2p)) with
loadings psi_j = 0.5 sqrt(E_n x_j^2); the score variance of the logistic
likelihood is bounded by 1/4, which motivates the halving.  Solved by
coordinate descent on iteratively reweighted quadratic approximations,
with an unpenalized intercept.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy.stats import norm
from scipy.special import expit, logit

from .rlasso import PenaltyConfig, RlassoFit

__all__ = ["rlassologit_fit", "predict_proba"]

_PROB_CLIP = 1e-6
_SEPARATION_BOUND = 30.0


def _logit_lambda(n: int, p: int, c: float, gamma: float) -> float:
    return (c / 2.0) * math.sqrt(n) * float(norm.ppf(1 - gamma / (2 * p)))


def rlassologit_fit(
    X,
    d,
    cfg: PenaltyConfig | None = None,
    intercept: bool = True,
    max_outer: int = 100,
    tol: float = 1e-7,
) -> RlassoFit:
    """l1-penalized logistic regression of a binary outcome d on X."""
    cfg = cfg or PenaltyConfig()
    X = np.asarray(X, dtype=float)
    d = np.asarray(d, dtype=float).ravel()
    n, p = X.shape
    if not np.all(np.isin(d, (0.0, 1.0))):
        raise ValueError("outcome must be binary 0/1")
    dbar = d.mean()
    if dbar in (0.0, 1.0):
        raise ValueError("both outcome classes must be present")

    c = cfg.c if cfg.c is not None else 1.1
    if cfg.homoscedastic == "none":
        lam = cfg.lambda_start
    else:
        lam = _logit_lambda(n, p, c, cfg.gamma)
    psi = 0.5 * np.sqrt(np.mean(X * X, axis=0))
    if np.any(psi <= 0):
        raise ValueError("zero-variance column; prune constants first")
    thresh = lam * psi / n

    beta0 = float(logit(dbar)) if intercept else 0.0
    beta = np.zeros(p)
    col_ssq = None  # weighted second moments, rebuilt per outer step

    for _ in range(max_outer):
        eta = beta0 + X @ beta
        prob = np.clip(expit(eta), _PROB_CLIP, 1 - _PROB_CLIP)
        w = np.maximum(prob * (1 - prob), 1e-6)
        z = eta + (d - prob) / w
        col_ssq = np.mean(w[:, None] * X * X, axis=0)
        wbar = w.mean()

        # One full coordinate sweep of the weighted quadratic approximation.
        r = z - eta  # working residual
        max_delta = 0.0
        if intercept:
            delta0 = float(np.mean(w * r)) / wbar
            beta0 += delta0
            r -= delta0
            max_delta = abs(delta0)
        for j in range(p):
            old = beta[j]
            zj = float(np.mean(w * X[:, j] * r)) + col_ssq[j] * old
            if zj > thresh[j]:
                new = (zj - thresh[j]) / col_ssq[j]
            elif zj < -thresh[j]:
                new = (zj + thresh[j]) / col_ssq[j]
            else:
                new = 0.0
            if new != old:
                r -= (new - old) * X[:, j]
                beta[j] = new
                max_delta = max(max_delta, abs(new - old))
        if max_delta < tol:
            break
    else:
        warnings.warn("penalized logistic fit did not converge", stacklevel=2)

    if np.any(np.abs(beta) > _SEPARATION_BOUND):
        warnings.warn("possible separation: very large logistic coefficient", stacklevel=2)

    prob = np.clip(expit(beta0 + X @ beta), _PROB_CLIP, 1 - _PROB_CLIP)
    residuals = d - prob
    support = np.flatnonzero(beta)
    sigma_hat = float(np.sqrt(np.mean(residuals * residuals)))
    return RlassoFit(
        coefficients=beta,
        intercept=beta0 if intercept else None,
        support=support,
        residuals=residuals,
        loadings=psi,
        lam=float(lam),
        sigma_hat=sigma_hat,
        iterations_used=0,
        post=False,
        r2=float("nan"),
        adj_r2=float("nan"),
    )


def predict_proba(fit: RlassoFit, Xnew) -> np.ndarray:
    """Fitted logistic probabilities, clipped away from 0 and 1."""
    Xnew = np.asarray(Xnew, dtype=float)
    eta = Xnew @ fit.coefficients
    if fit.intercept is not None:
        eta = eta + fit.intercept
    return np.clip(expit(eta), _PROB_CLIP, 1 - _PROB_CLIP)
