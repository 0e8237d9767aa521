import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rigorlasso.simkit import (
    RngStream,
    SparseDgpConfig,
    draw_multipliers,
    gen_approx_sparse_linear,
    gen_causes_controls,
    gen_sparse_linear,
)


def test_same_stream_reproduces():
    a = RngStream(7, 3).generator().standard_normal(10)
    b = RngStream(7, 3).generator().standard_normal(10)
    assert np.array_equal(a, b)


def test_distinct_streams_differ():
    a = RngStream(7, 0).generator().standard_normal(10)
    b = RngStream(7, 1).generator().standard_normal(10)
    c = RngStream(8, 0).generator().standard_normal(10)
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_child_is_deterministic_and_value_semantic():
    root = RngStream(42)
    assert root.child(5) == RngStream(42).child(5)
    assert root.child(1) != root.child(2)
    # nested children from different parents should not collide
    assert root.child(1).child(1) != root.child(2).child(1)


@settings(max_examples=50, deadline=None)
@given(
    seed=st.integers(0, 2**32),
    i=st.integers(0, 10_000),
    j=st.integers(0, 10_000),
)
def test_child_indices_injective(seed, i, j):
    root = RngStream(seed)
    if i != j:
        assert root.child(i) != root.child(j)


def test_stream_insensitive_to_consumption_order():
    root = RngStream(3)
    a1 = root.child(1).generator().standard_normal(5)
    _ = root.child(2).generator().standard_normal(1000)
    a2 = root.child(1).generator().standard_normal(5)
    assert np.array_equal(a1, a2)


@pytest.mark.parametrize("kind", ["normal", "bayes", "wild"])
def test_multipliers_mean_zero_unit_variance(kind):
    g = draw_multipliers(kind, 200_000, RngStream(1))
    assert abs(g.mean()) < 0.02
    assert abs(g.var() - 1.0) < 0.02


def test_wild_multipliers_are_rademacher():
    g = draw_multipliers("wild", 1000, RngStream(2))
    assert set(np.unique(g)) <= {-1.0, 1.0}


def test_multiplier_errors():
    with pytest.raises(ValueError):
        draw_multipliers("gaussian", 10, RngStream(0))
    with pytest.raises(ValueError):
        draw_multipliers("normal", 0, RngStream(0))


def test_dgp_config_validation():
    with pytest.raises(ValueError):
        SparseDgpConfig(n=0, p=5, s=1)
    with pytest.raises(ValueError):
        SparseDgpConfig(n=10, p=5, s=6)
    with pytest.raises(ValueError):
        SparseDgpConfig(n=10, p=5, s=1, noise_sd=0.0)
    with pytest.raises(ValueError):
        SparseDgpConfig(n=10, p=5, s=1, decay_exponent=0.5)


def test_gen_sparse_linear_shapes_and_beta():
    cfg = SparseDgpConfig(n=30, p=8, s=3, beta_value=2.0)
    X, y, beta = gen_sparse_linear(cfg, RngStream(5))
    assert X.shape == (30, 8) and y.shape == (30,)
    assert np.array_equal(beta, [2, 2, 2, 0, 0, 0, 0, 0])


def test_gen_approx_sparse_decay():
    cfg = SparseDgpConfig(n=20, p=6, s=1, decay_envelope=3.0, decay_exponent=2.0)
    X, y, beta = gen_approx_sparse_linear(cfg, RngStream(5))
    assert np.allclose(beta, 3.0 * np.arange(1, 7, dtype=float) ** -2.0)
    assert np.all(np.diff(np.abs(beta)) < 0)


def test_gen_causes_controls_roles():
    X, y, roles = gen_causes_controls(50, 4, 3, 5.0, 5.0, RngStream(9))
    assert X.shape == (50, 7)
    assert roles == ["target"] * 4 + ["control"] * 3
    with pytest.raises(ValueError):
        gen_causes_controls(50, 0, 3, 1.0, 1.0, RngStream(9))
