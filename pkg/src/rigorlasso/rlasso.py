"""Rigorous Lasso: data-driven penalty rules, iterative fitting, post-OLS
refit, prediction, and the sup-score joint significance test.

The penalty level lambda is chosen by one of four rules (homoscedastic or
heteroscedastic errors, design-independent or design-dependent quantiles)
rather than by cross-validation.  Residuals, loadings, and sigma are
updated by iteration starting from a small OLS pilot fit.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from .shooting import shooting_lasso
from .simkit import RngStream

__all__ = [
    "PenaltyConfig",
    "RlassoFit",
    "SupScoreResult",
    "compute_loadings",
    "lambda_homoscedastic_xindep",
    "lambda_homoscedastic_xdep",
    "lambda_heteroscedastic_xindep",
    "lambda_heteroscedastic_xdep",
    "rlasso_fit",
    "predict",
    "sup_score_test",
]

C_POST_DEFAULT = 1.1
C_LASSO_DEFAULT = 0.5


@dataclass(frozen=True)
class PenaltyConfig:
    """Penalty rule selection and iteration controls.

    c defaults to 1.1 when post-Lasso is used and 0.5 for plain Lasso
    (resolved at fit time when left as None).  homoscedastic is a
    tri-state: True, False, or "none" meaning a user-supplied fixed
    lambda_start with homoscedastic-style loadings and no iteration.
    """

    c: float | None = None
    gamma: float = 0.1
    homoscedastic: bool | str = False
    x_dependent: bool = False
    lambda_start: float | None = None
    num_sim: int = 5000
    max_iter: int = 15
    tol: float = 1e-5

    def __post_init__(self):
        if self.c is not None and self.c <= 0:
            raise ValueError("c must be positive")
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must lie in (0, 1)")
        if self.num_sim < 1 or self.max_iter < 1 or self.tol <= 0:
            raise ValueError("num_sim, max_iter must be >= 1 and tol > 0")
        if self.homoscedastic not in (True, False, "none"):
            raise ValueError('homoscedastic must be True, False, or "none"')
        if self.homoscedastic == "none" and self.lambda_start is None:
            raise ValueError('homoscedastic="none" requires lambda_start')

    def resolve_c(self, post: bool) -> float:
        if self.c is not None:
            return self.c
        return C_POST_DEFAULT if post else C_LASSO_DEFAULT


@dataclass
class RlassoFit:
    """Result of a rigorous Lasso (or post-Lasso) fit."""

    coefficients: np.ndarray
    intercept: float | None
    support: np.ndarray  # sorted indices of nonzero coefficients
    residuals: np.ndarray
    loadings: np.ndarray
    lam: float
    sigma_hat: float
    iterations_used: int
    post: bool
    r2: float
    adj_r2: float
    column_names: tuple | None = None
    degenerate: bool = False

    def to_dict(self, include_loadings: bool = True) -> dict:
        names = self.column_names or tuple(str(j) for j in range(len(self.coefficients)))
        out = {
            "coefficients": {n: float(b) for n, b in zip(names, self.coefficients)},
            "intercept": None if self.intercept is None else float(self.intercept),
            "support": [names[j] for j in self.support],
            "lambda": float(self.lam),
            "sigma_hat": float(self.sigma_hat),
            "r2": float(self.r2),
            "adj_r2": float(self.adj_r2),
            "post": bool(self.post),
            "iterations_used": int(self.iterations_used),
        }
        if include_loadings:
            out["loadings"] = {n: float(v) for n, v in zip(names, self.loadings)}
        return out

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(**kwargs), sort_keys=True)


@dataclass(frozen=True)
class SupScoreResult:
    statistic: float
    critical_value: float
    p_value: float
    num_boot: int
    alpha: float

    @property
    def reject(self) -> bool:
        return self.statistic > self.critical_value


def _quantile_order_stat(values: np.ndarray, level: float) -> float:
    """Order-statistic quantile: the ceil(m * level)-th smallest value."""
    m = len(values)
    k = min(max(int(math.ceil(m * level)), 1), m)
    return float(np.partition(values, k - 1)[k - 1])


def compute_loadings(X, residuals=None, homoscedastic: bool = True) -> np.ndarray:
    """Penalty loadings: sqrt(E_n x_j^2), or sqrt(E_n[x_j^2 eps^2]) under
    heteroscedasticity."""
    X = np.asarray(X, dtype=float)
    if homoscedastic:
        psi = np.sqrt(np.mean(X * X, axis=0))
    else:
        if residuals is None:
            raise ValueError("heteroscedastic loadings require residuals")
        eps = np.asarray(residuals, dtype=float)
        psi = np.sqrt(np.mean(X * X * (eps * eps)[:, None], axis=0))
    if np.any(psi <= 0):
        raise ValueError("zero penalty loading; remove degenerate columns first")
    return psi


def lambda_homoscedastic_xindep(n, p, sigma_hat, c, gamma) -> float:
    if min(n, p) < 1 or sigma_hat < 0 or c <= 0:
        raise ValueError("invalid penalty inputs")
    q = gamma / (2 * p)
    if q >= 1:
        raise ValueError("gamma/(2p) must be below 1")
    return 2.0 * c * math.sqrt(n) * sigma_hat * float(norm.ppf(1 - q))


def lambda_heteroscedastic_xindep(n, p, c, gamma) -> float:
    return lambda_homoscedastic_xindep(n, p, 1.0, c, gamma)


def _simulated_sup_quantile(X, weights, level, num_sim, rng: RngStream) -> float:
    """(level)-quantile of max_j |X_j'(w * e)| over standard normal e."""
    n = X.shape[0]
    gen = rng.generator()
    # Batch the simulation to bound memory at ~ n x 512 doubles per block.
    draws = np.empty(num_sim)
    done = 0
    while done < num_sim:
        block = min(512, num_sim - done)
        E = gen.standard_normal((n, block))
        if weights is not None:
            E *= weights[:, None]
        draws[done : done + block] = np.max(np.abs(X.T @ E), axis=0)
        done += block
    return _quantile_order_stat(draws, level)


def lambda_homoscedastic_xdep(X, sigma_hat, c, gamma, num_sim, rng: RngStream) -> float:
    if num_sim < 100:
        warnings.warn("num_sim below 100 gives a noisy simulated quantile", stacklevel=2)
    X = np.asarray(X, dtype=float)
    # n * max_j |E_n[x_j e]| = max_j |X_j'e|
    q = _simulated_sup_quantile(X, None, 1 - gamma, num_sim, rng)
    return 2.0 * c * sigma_hat * q


def lambda_heteroscedastic_xdep(X, residuals, c, gamma, num_sim, rng: RngStream) -> float:
    X = np.asarray(X, dtype=float)
    eps = np.asarray(residuals, dtype=float)
    if np.all(eps == 0):
        warnings.warn("all residuals zero: degenerate lambda = 0", stacklevel=2)
        return 0.0
    if num_sim < 100:
        warnings.warn("num_sim below 100 gives a noisy simulated quantile", stacklevel=2)
    # W = n max_j |2 E_n[x_j eps e]| = 2 max_j |X_j'(eps * e)|
    q = _simulated_sup_quantile(X, eps, 1 - gamma, num_sim, rng)
    return c * 2.0 * q


def _ols_on(Xc, yc, idx):
    """Least squares of yc on the selected columns; pseudoinverse fallback."""
    sub = Xc[:, idx]
    coef, _, rank, _ = np.linalg.lstsq(sub, yc, rcond=None)
    return coef


def rlasso_fit(
    X,
    y,
    cfg: PenaltyConfig | None = None,
    post: bool = True,
    intercept: bool = True,
    rng: RngStream | None = None,
    column_names=None,
    penalty_free=(),
) -> RlassoFit:
    """Iterative rigorous Lasso with optional post-OLS refit.

    penalty_free lists column indices whose loadings are pinned to zero
    (never penalized, always kept in the refit), used e.g. to force
    low-dimensional controls into an instrument-selection regression.
    """
    cfg = cfg or PenaltyConfig()
    rng = rng or RngStream(0)
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ValueError("X and y have incompatible shapes")
    n, p = X.shape
    if n < 2 or p < 1:
        raise ValueError("need n >= 2 and at least one column")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValueError("non-finite values in inputs")
    penalty_free = np.asarray(sorted(set(penalty_free)), dtype=int)

    if intercept:
        xbar = X.mean(axis=0)
        ybar = y.mean()
        Xc = X - xbar
        yc = y - ybar
    else:
        Xc, yc = X, y

    col_sq = np.mean(Xc * Xc, axis=0)
    raw_sq = np.mean(X * X, axis=0)
    # relative check: centering a constant column leaves only rounding dust
    if np.any(col_sq <= 1e-24 * np.maximum(raw_sq, 1.0)):
        bad = int(np.argmin(col_sq / np.maximum(raw_sq, 1.0)))
        raise ValueError(f"column {bad} is constant after centering; prune it first")

    c = cfg.resolve_c(post)
    fixed_lambda = cfg.homoscedastic == "none"
    homosc = cfg.homoscedastic is True

    # Pilot residuals: OLS of y on the <=5 columns most correlated with y.
    ysd = yc.std()
    if ysd == 0:
        corr = np.zeros(p)
    else:
        xdev = Xc - Xc.mean(axis=0)
        xsd = np.maximum(xdev.std(axis=0), 1e-300)
        corr = np.abs(xdev.T @ (yc - yc.mean())) / (n * xsd * ysd)
    k0 = min(5, p)
    pilot_idx = np.argsort(-corr, kind="stable")[:k0]
    pilot_coef = _ols_on(Xc, yc, pilot_idx)
    resid = yc - Xc[:, pilot_idx] @ pilot_coef

    beta = np.zeros(p)
    psi_prev = None
    sigma_prev = None
    lam = cfg.lambda_start if fixed_lambda else 0.0
    degenerate = False
    iterations = 0
    max_iter = 1 if fixed_lambda else cfg.max_iter

    for iteration in range(1, max_iter + 1):
        iterations = iteration
        sigma_hat = float(np.sqrt(np.mean(resid * resid)))
        yscale = float(np.sqrt(np.mean(yc * yc)))
        if sigma_hat <= 1e-12 * max(yscale, 1.0):
            # Noiseless fit: the data lie in the span of some columns, so
            # the penalty degenerates; fall back to plain least squares.
            degenerate = True
            beta, _, _, _ = np.linalg.lstsq(Xc, yc, rcond=None)
            beta[np.abs(beta) <= 1e-8 * max(1.0, float(np.max(np.abs(beta))))] = 0.0
            break
        if fixed_lambda or homosc:
            psi = np.sqrt(col_sq)
        else:
            psi = compute_loadings(Xc, resid, homoscedastic=False)

        if not fixed_lambda:
            if homosc:
                if cfg.x_dependent:
                    lam = lambda_homoscedastic_xdep(
                        Xc, sigma_hat, c, cfg.gamma, cfg.num_sim, rng.child(iteration)
                    )
                else:
                    lam = lambda_homoscedastic_xindep(n, p, sigma_hat, c, cfg.gamma)
            else:
                if cfg.x_dependent:
                    lam = lambda_heteroscedastic_xdep(
                        Xc, resid, c, cfg.gamma, cfg.num_sim, rng.child(iteration)
                    )
                else:
                    lam = lambda_heteroscedastic_xindep(n, p, c, cfg.gamma)
        if lam == 0.0:
            degenerate = True

        if penalty_free.size:
            psi = psi.copy()
            psi[penalty_free] = 0.0

        beta = shooting_lasso(Xc, yc, lam, psi, beta_init=beta)
        support = np.flatnonzero(beta)
        refit_idx = np.union1d(support, penalty_free).astype(int)

        if post and refit_idx.size:
            coef = _ols_on(Xc, yc, refit_idx)
            resid = yc - Xc[:, refit_idx] @ coef
        elif refit_idx.size:
            resid = yc - Xc @ beta
        else:
            resid = yc.copy()

        if psi_prev is not None:
            psi_change = float(np.max(np.abs(psi - psi_prev)))
            sigma_change = abs(sigma_hat - (sigma_prev or 0.0))
            # Homoscedastic loadings never move, so track sigma there too.
            if psi_change < cfg.tol and (not homosc or sigma_change < cfg.tol):
                psi_prev, sigma_prev = psi, sigma_hat
                break
        psi_prev, sigma_prev = psi, sigma_hat

    support = np.flatnonzero(beta)
    coefficients = beta.copy()
    if post:
        refit_idx = np.union1d(support, penalty_free).astype(int)
        coefficients = np.zeros(p)
        if refit_idx.size:
            if refit_idx.size >= n:
                warnings.warn(
                    "selected support at least as large as n; using pseudoinverse refit",
                    stacklevel=2,
                )
            coefficients[refit_idx] = _ols_on(Xc, yc, refit_idx)
        support = np.flatnonzero(coefficients)

    residuals = yc - Xc @ coefficients
    sigma_hat = float(np.sqrt(np.mean(residuals * residuals)))
    fit_intercept = float(ybar - xbar @ coefficients) if intercept else None

    tss = float(np.sum(yc * yc))
    rss = float(np.sum(residuals * residuals))
    r2 = 1.0 - rss / tss if tss > 0 else float("nan")
    dof = int(support.size) + (1 if intercept else 0)
    if n - dof > 0 and tss > 0:
        adj_r2 = 1.0 - (1.0 - r2) * (n - 1) / (n - dof)
    else:
        adj_r2 = float("nan")

    return RlassoFit(
        coefficients=coefficients,
        intercept=fit_intercept,
        support=support,
        residuals=residuals,
        loadings=psi_prev if psi_prev is not None else np.sqrt(col_sq),
        lam=float(lam),
        sigma_hat=sigma_hat,
        iterations_used=iterations,
        post=post,
        r2=r2,
        adj_r2=adj_r2,
        column_names=tuple(column_names) if column_names is not None else None,
        degenerate=degenerate,
    )


def predict(fit: RlassoFit, Xnew) -> np.ndarray:
    """Linear prediction intercept + Xnew @ coefficients."""
    Xnew = np.asarray(Xnew, dtype=float)
    if Xnew.ndim == 1:
        Xnew = Xnew[None, :]
    if Xnew.shape[1] != len(fit.coefficients):
        raise ValueError(
            f"Xnew has {Xnew.shape[1]} columns, fit expects {len(fit.coefficients)}"
        )
    out = Xnew @ fit.coefficients
    if fit.intercept is not None:
        out = out + fit.intercept
    return out


def sup_score_test(
    X,
    y,
    num_boot: int = 1000,
    alpha: float = 0.05,
    rng: RngStream | None = None,
    studentize: bool = True,
) -> SupScoreResult:
    """Joint significance test of all slope coefficients.

    The statistic is the sup-norm of the centered score sqrt(n) E_n[(y -
    ybar) x_j]; its critical value is simulated by multiplying the score
    contributions with iid standard normals.  Columns are rescaled to unit
    second moment by default so the max is unit-free (studentize=False
    restores the raw statistic).
    """
    rng = rng or RngStream(0)
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    n, p = X.shape
    if n < 2 or num_boot < 1:
        raise ValueError("need n >= 2 and num_boot >= 1")
    if studentize:
        scale = np.sqrt(np.mean(X * X, axis=0))
        if np.any(scale <= 0):
            raise ValueError("zero-scale column; prune constants first")
        X = X / scale
    u = y - y.mean()
    score = X.T @ u / math.sqrt(n)
    statistic = float(np.max(np.abs(score)))

    gen = rng.generator()
    draws = np.empty(num_boot)
    done = 0
    while done < num_boot:
        block = min(512, num_boot - done)
        G = gen.standard_normal((n, block))
        draws[done : done + block] = np.max(np.abs(X.T @ (u[:, None] * G)), axis=0) / math.sqrt(n)
        done += block
    critical = _quantile_order_stat(draws, 1 - alpha)
    p_value = (float(np.sum(draws >= statistic)) + 1.0) / (num_boot + 1.0)
    return SupScoreResult(
        statistic=statistic,
        critical_value=critical,
        p_value=p_value,
        num_boot=num_boot,
        alpha=alpha,
    )
