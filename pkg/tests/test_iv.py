import numpy as np
import pytest

from rigorlasso.iv import (
    rlasso_iv_select_x,
    rlasso_iv_select_xz,
    rlasso_iv_select_z,
    tsls,
)
from rigorlasso.simkit import RngStream


def iv_sample(seed, n=400, px=30, pz=15, alpha0=1.5):
    gen = RngStream(seed).generator()
    x = gen.standard_normal((n, px))
    z = gen.standard_normal((n, pz))
    u = gen.standard_normal(n)
    d = 2.0 * z[:, 0] + x[:, 0] + u + gen.standard_normal(n)
    y = alpha0 * d + 2.0 * x[:, 0] - u + gen.standard_normal(n)
    return x, z, d, y


def test_self_instrument_reduces_to_ols():
    gen = RngStream(90).generator()
    n = 200
    d = gen.standard_normal(n)
    y = 2.0 * d + gen.standard_normal(n)
    fit = tsls(y, d, None, d)
    Z = np.column_stack([d, np.ones(n)])
    ols = np.linalg.lstsq(Z, y, rcond=None)[0][0]
    assert fit.alpha_hat == pytest.approx(ols, abs=1e-10)


def test_single_instrument_equals_wald_ratio():
    gen = RngStream(91).generator()
    n = 300
    z = gen.standard_normal(n)
    d = z + gen.standard_normal(n)
    y = 1.5 * d + gen.standard_normal(n)
    fit = tsls(y, d, None, z)
    zc = z - z.mean()
    wald = float(zc @ y) / float(zc @ d)
    assert fit.alpha_hat == pytest.approx(wald, abs=1e-10)


def test_tsls_errors():
    gen = RngStream(92).generator()
    n = 50
    d = gen.standard_normal((n, 2))
    y = gen.standard_normal(n)
    z = gen.standard_normal(n)
    with pytest.raises(ValueError, match="order condition"):
        tsls(y, d, None, z)
    with pytest.raises(ValueError, match="rank deficient"):
        tsls(y, d[:, 0], None, np.column_stack([z, z]))
    with pytest.raises(ValueError, match="required"):
        tsls(y, None, None, z)


def test_select_z_picks_relevant_instrument():
    x, z, d, y = iv_sample(93)
    fit = rlasso_iv_select_z(x, d, y, z, rng=RngStream(94))
    assert fit.regime == "select_z"
    assert 0 in fit.selected_z
    assert abs(fit.alpha_hat - 1.5) < 4 * fit.se


def test_select_z_empty_selection_raises():
    gen = RngStream(96).generator()
    n = 200
    x = gen.standard_normal((n, 3))
    z = gen.standard_normal((n, 10))  # all irrelevant
    d = x[:, 0] + gen.standard_normal(n)
    y = d + gen.standard_normal(n)
    with pytest.raises(ValueError, match="identification lost"):
        rlasso_iv_select_z(x, d, y, z, rng=RngStream(97))


def test_select_x_close_to_truth():
    x, z, d, y = iv_sample(97)
    fit = rlasso_iv_select_x(x, d, y, z[:, :3], rng=RngStream(98))
    assert fit.regime == "select_x"
    assert 0 in fit.selected_x
    assert abs(fit.alpha_hat - 1.5) < 4 * fit.se


def test_select_xz_close_to_truth():
    x, z, d, y = iv_sample(99)
    fit = rlasso_iv_select_xz(x, d, y, z, rng=RngStream(100))
    assert fit.regime == "select_xz"
    assert abs(fit.alpha_hat - 1.5) < 4 * fit.se
    assert fit.first_stage is not None


def test_regimes_agree_on_strong_design():
    x, z, d, y = iv_sample(101)
    fz = rlasso_iv_select_z(x, d, y, z, rng=RngStream(102))
    fx = rlasso_iv_select_x(x, d, y, z, rng=RngStream(102))
    fxz = rlasso_iv_select_xz(x, d, y, z, rng=RngStream(102))
    for a, b in ((fz, fx), (fx, fxz)):
        assert abs(a.alpha_hat - b.alpha_hat) < 3 * max(a.se, b.se)


def test_confint_brackets_estimate():
    x, z, d, y = iv_sample(103)
    fit = rlasso_iv_select_x(x, d, y, z, rng=RngStream(104))
    lo, hi = fit.confint(0.95)
    assert lo < fit.alpha_hat < hi
