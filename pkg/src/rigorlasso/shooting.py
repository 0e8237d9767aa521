"""Coordinate-descent (shooting) solver for the weighted-l1 Lasso objective.

Minimizes  E_n[(y - x'beta)^2] + (lam/n) * sum_j psi_j |beta_j|
by cyclic soft-threshold updates over a precomputed Gram matrix.
"""

from __future__ import annotations

import warnings

import numpy as np

__all__ = ["shooting_lasso", "ShootingWarning"]


class ShootingWarning(UserWarning):
    pass


def _soft(z: float, t: float) -> float:
    if z > t:
        return z - t
    if z < -t:
        return z + t
    return 0.0


def shooting_lasso(
    X,
    y,
    lam: float,
    loadings,
    beta_init=None,
    max_pass: int = 1000,
    tol_coef: float = 1e-7,
    debug: bool = False,
):
    """Return the coefficient vector minimizing the penalized objective.

    loadings may contain zeros for columns that must never be penalized.
    Sweep order is fixed ascending column index; convergence is declared
    when the largest coefficient change within a sweep drops below
    tol_coef.  If max_pass sweeps do not converge the best iterate is
    returned with a ShootingWarning.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    psi = np.asarray(loadings, dtype=float)
    if psi.shape != (p,):
        raise ValueError("loadings must have one entry per column")
    if np.any(psi < 0):
        raise ValueError("loadings must be nonnegative")
    if not np.all(np.isfinite(X)):
        raise ValueError("design matrix contains non-finite values")

    xty = X.T @ y / n
    gram = X.T @ X / n
    diag = np.diag(gram).copy()
    if np.any(diag <= 0):
        raise ValueError("zero-variance column in design matrix")

    beta = np.zeros(p) if beta_init is None else np.array(beta_init, dtype=float)
    thresh = lam * psi / (2.0 * n)

    def objective(b):
        r = y - X @ b
        return r @ r / n + (lam / n) * float(psi @ np.abs(b))

    prev_obj = objective(beta) if debug else None
    for _ in range(max_pass):
        max_delta = 0.0
        for j in range(p):
            old = beta[j]
            # partial residual correlation with column j
            z = xty[j] - gram[j] @ beta + diag[j] * old
            new = _soft(z, thresh[j]) / diag[j]
            if new != old:
                beta[j] = new
                delta = abs(new - old)
                if delta > max_delta:
                    max_delta = delta
        if debug:
            obj = objective(beta)
            assert obj <= prev_obj + 1e-10, "objective increased within a sweep"
            prev_obj = obj
        if max_delta < tol_coef:
            break
    else:
        warnings.warn(
            f"shooting solver did not converge in {max_pass} sweeps "
            f"(last max coefficient change {max_delta:.3e})",
            ShootingWarning,
            stacklevel=2,
        )
    return beta
