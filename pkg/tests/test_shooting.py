import numpy as np
import pytest

from rigorlasso.shooting import ShootingWarning, shooting_lasso
from rigorlasso.simkit import RngStream


def objective(X, y, lam, psi, b):
    n = len(y)
    r = y - X @ b
    return r @ r / n + (lam / n) * float(psi @ np.abs(b))


def orthonormal_design(n, p, rng):
    M = rng.standard_normal((n, p))
    Q, _ = np.linalg.qr(M)
    return Q * np.sqrt(n)  # columns with E_n[x_j^2] = 1, exactly orthogonal


def test_orthonormal_matches_soft_threshold_oracle():
    # With X'X/n = I the solution decouples into per-coordinate soft
    # thresholds of the marginal covariances.
    gen = RngStream(10).generator()
    for _ in range(50):
        n, p = 40, 8
        X = orthonormal_design(n, p, gen)
        y = gen.standard_normal(n) * 2.0
        lam = float(gen.uniform(0.5, 30.0))
        psi = gen.uniform(0.5, 2.0, size=p)
        beta = shooting_lasso(X, y, lam, psi)
        z = X.T @ y / n
        t = lam * psi / (2.0 * n)
        oracle = np.sign(z) * np.maximum(np.abs(z) - t, 0.0)
        assert np.allclose(beta, oracle, atol=1e-8)


def test_solution_beats_random_candidates():
    gen = RngStream(11).generator()
    n, p = 60, 12
    X = gen.standard_normal((n, p))
    y = gen.standard_normal(n)
    lam, psi = 10.0, np.ones(p)
    beta = shooting_lasso(X, y, lam, psi, debug=True)
    best = objective(X, y, lam, psi, beta)
    for _ in range(200):
        cand = beta + gen.standard_normal(p) * gen.uniform(1e-4, 0.5)
        assert objective(X, y, lam, psi, cand) >= best - 1e-12


def test_zero_penalty_recovers_ols():
    gen = RngStream(12).generator()
    X = gen.standard_normal((50, 4))
    y = gen.standard_normal(50)
    beta = shooting_lasso(X, y, 0.0, np.ones(4), tol_coef=1e-12)
    ols = np.linalg.lstsq(X, y, rcond=None)[0]
    assert np.allclose(beta, ols, atol=1e-6)


def test_zero_loading_column_never_penalized():
    gen = RngStream(13).generator()
    X = gen.standard_normal((80, 5))
    y = 3.0 * X[:, 0] + gen.standard_normal(80)
    psi = np.ones(5)
    psi[0] = 0.0
    beta = shooting_lasso(X, y, 1e6, psi)
    assert beta[0] != 0.0
    assert np.all(beta[1:] == 0.0)


def test_warns_when_not_converged():
    gen = RngStream(14).generator()
    X = gen.standard_normal((30, 10))
    y = gen.standard_normal(30)
    with pytest.warns(ShootingWarning):
        shooting_lasso(X, y, 1.0, np.ones(10), max_pass=1, tol_coef=1e-14)


def test_input_validation():
    X = np.ones((5, 2)) * [[1.0, 0.0]] * 5
    y = np.ones(5)
    with pytest.raises(ValueError, match="loadings"):
        shooting_lasso(np.random.randn(5, 2), y, 1.0, np.ones(3))
    with pytest.raises(ValueError, match="nonnegative"):
        shooting_lasso(np.random.randn(5, 2), y, 1.0, np.array([1.0, -1.0]))
    with pytest.raises(ValueError, match="zero-variance"):
        shooting_lasso(X, y, 1.0, np.ones(2))
