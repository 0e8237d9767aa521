import numpy as np
import pytest
from scipy.special import expit

from rigorlasso.simkit import RngStream
from rigorlasso.treatment import (
    bootstrap_se,
    rlasso_ate,
    rlasso_atet,
    rlasso_late,
    rlasso_latet,
)


def confounded_treatment(seed, n=400, p=20, effect=2.0):
    gen = RngStream(seed).generator()
    x = gen.standard_normal((n, p))
    m = expit(0.8 * x[:, 0])
    d = (gen.uniform(size=n) < m).astype(float)
    y = effect * d + x[:, 0] + gen.standard_normal(n)
    return x, d, y


def instrumented_treatment(seed, n=500, p=15, effect=2.0):
    gen = RngStream(seed).generator()
    x = gen.standard_normal((n, p))
    z = (gen.uniform(size=n) < 0.5).astype(float)
    take = np.where(z == 1, gen.uniform(size=n) < 0.85, gen.uniform(size=n) < 0.15)
    d = take.astype(float)
    y = effect * d + x[:, 0] + gen.standard_normal(n)
    return x, d, y, z


def test_ate_unconfounded_matches_difference_in_means():
    gen = RngStream(110).generator()
    n, p = 500, 10
    x = gen.standard_normal((n, p))
    d = (gen.uniform(size=n) < 0.5).astype(float)
    y = 2.0 * d + gen.standard_normal(n)
    fit = rlasso_ate(x, d, y, rng=RngStream(111))
    diff = y[d == 1].mean() - y[d == 0].mean()
    assert abs(fit.alpha_hat - diff) < 2 * fit.se
    assert abs(fit.alpha_hat - 2.0) < 4 * fit.se


def test_ate_and_atet_remove_confounding():
    x, d, y = confounded_treatment(112)
    ate = rlasso_ate(x, d, y, rng=RngStream(113))
    atet = rlasso_atet(x, d, y, rng=RngStream(113))
    naive = y[d == 1].mean() - y[d == 0].mean()
    assert abs(naive - 2.0) > 0.3  # confounding is material
    assert abs(ate.alpha_hat - 2.0) < 4 * ate.se
    assert abs(atet.alpha_hat - 2.0) < 4 * atet.se


def test_influence_mean_zero_and_se_is_sd_over_sqrt_n():
    x, d, y = confounded_treatment(114)
    fit = rlasso_ate(x, d, y, rng=RngStream(115))
    psi = fit.influence
    assert abs(float(psi.mean())) < 1e-10
    assert fit.se == pytest.approx(float(psi.std()) / np.sqrt(len(psi)))


def test_relabeling_flips_sign_of_ate():
    x, d, y = confounded_treatment(116)
    a = rlasso_ate(x, d, y, rng=RngStream(117))
    b = rlasso_ate(x, 1.0 - d, y, rng=RngStream(117))
    assert abs(a.alpha_hat + b.alpha_hat) < 0.5 * (a.se + b.se)


def test_late_recovers_complier_effect():
    x, d, y, z = instrumented_treatment(118)
    late = rlasso_late(x, d, y, z, rng=RngStream(119))
    latet = rlasso_latet(x, d, y, z, rng=RngStream(119))
    assert abs(late.alpha_hat - 2.0) < 4 * late.se
    assert abs(latet.alpha_hat - 2.0) < 4 * latet.se


def test_perfect_compliance_late_equals_ate():
    gen = RngStream(120).generator()
    n, p = 400, 10
    x = gen.standard_normal((n, p))
    z = (gen.uniform(size=n) < 0.5).astype(float)
    y = 2.0 * z + x[:, 0] + gen.standard_normal(n)
    late = rlasso_late(x, z, y, z, rng=RngStream(121))
    ate = rlasso_ate(x, z, y, rng=RngStream(121))
    assert late.alpha_hat == pytest.approx(ate.alpha_hat, rel=1e-6)


def test_no_compliers_raises():
    gen = RngStream(122).generator()
    n = 200
    x = gen.standard_normal((n, 5))
    z = (gen.uniform(size=n) < 0.5).astype(float)
    d = np.zeros(n)  # nobody takes the treatment
    y = x[:, 0] + gen.standard_normal(n)
    with pytest.raises(ValueError, match="compliers"):
        rlasso_late(x, d, y, z, rng=RngStream(123))


def test_input_validation():
    gen = RngStream(124).generator()
    x = gen.standard_normal((100, 5))
    y = gen.standard_normal(100)
    with pytest.raises(ValueError, match="binary"):
        rlasso_ate(x, gen.standard_normal(100), y)
    with pytest.raises(ValueError, match="both treatment arms"):
        rlasso_atet(x, np.ones(100), y)
    with pytest.raises(ValueError, match="fewer than"):
        d = np.zeros(100)
        d[:2] = 1.0
        rlasso_ate(x, d, y)


def test_bootstrap_se_matches_analytic_limit():
    gen = RngStream(125).generator()
    psi = gen.standard_normal(300) * 3.0
    psi -= psi.mean()
    analytic = float(psi.std()) / np.sqrt(len(psi))
    for kind in ("normal", "bayes", "wild"):
        se, draws = bootstrap_se(psi, kind, nRep=2000, rng=RngStream(126))
        assert len(draws) == 2000
        assert abs(se - analytic) / analytic < 0.1
    with pytest.raises(ValueError):
        bootstrap_se(psi, "normal", nRep=1)


def test_bootstrap_se_plumbs_through_fit():
    x, d, y = confounded_treatment(127)
    fit = rlasso_ate(x, d, y, bootstrap_kind="normal", nRep=400, rng=RngStream(128))
    plain = rlasso_ate(x, d, y, rng=RngStream(128))
    assert fit.bootstrap == "normal"
    assert fit.boot_draws is not None and len(fit.boot_draws) == 400
    assert abs(fit.se - plain.se) / plain.se < 0.25
