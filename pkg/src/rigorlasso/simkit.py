"""Seeded random streams, bootstrap multiplier draws, and synthetic designs.

Streams are counter-based (Philox) so that a given (seed, stream_id) pair
produces the same draws no matter how many other streams were consumed, on
any thread schedule.  Bootstrap loops should derive one child stream per
replicate instead of sharing a generator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "RngStream",
    "SparseDgpConfig",
    "gen_sparse_linear",
    "gen_approx_sparse_linear",
    "gen_causes_controls",
    "draw_multipliers",
]

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    """Value-semantic handle for a reproducible random stream."""

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        key = ((self.seed & _MASK64) << 64) | (self.stream_id & _MASK64)
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, index: int) -> "RngStream":
        """Derive an independent stream, e.g. one per bootstrap replicate."""
        # Golden-ratio mixing keeps child ids distinct across nesting levels.
        mixed = (self.stream_id * 0x9E3779B97F4A7C15 + index + 1) & _MASK64
        return RngStream(self.seed, mixed)


@dataclass(frozen=True)
class SparseDgpConfig:
    """Configuration for the sparse linear designs used in simulations."""

    n: int
    p: int
    s: int
    beta_value: float = 5.0
    noise_sd: float = 1.0
    decay_envelope: float = 1.0  # only used by the approximately sparse design
    decay_exponent: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 1 <= self.s <= self.p:
            raise ValueError("need 1 <= s <= p")
        if self.noise_sd <= 0:
            raise ValueError("noise_sd must be positive")
        if self.decay_exponent <= 0.5:
            raise ValueError("decay_exponent must exceed 1/2")


def gen_sparse_linear(cfg: SparseDgpConfig, rng: RngStream):
    """Exactly sparse linear design: y = X beta + noise.

    Returns (X, y, beta_true) with X entries iid standard normal and
    beta_true = (beta_value, ..., beta_value, 0, ..., 0) with s leading
    nonzeros.
    """
    gen = rng.generator()
    X = gen.standard_normal((cfg.n, cfg.p))
    beta = np.zeros(cfg.p)
    beta[: cfg.s] = cfg.beta_value
    y = X @ beta + cfg.noise_sd * gen.standard_normal(cfg.n)
    return X, y, beta


def gen_approx_sparse_linear(cfg: SparseDgpConfig, rng: RngStream):
    """Approximately sparse design with polynomially decaying coefficients.

    Coefficient j has magnitude decay_envelope * (j+1) ** -decay_exponent,
    so no coefficient is exactly zero but an s-sparse approximation is good.
    """
    gen = rng.generator()
    X = gen.standard_normal((cfg.n, cfg.p))
    beta = cfg.decay_envelope * (np.arange(1, cfg.p + 1) ** -cfg.decay_exponent)
    y = X @ beta + cfg.noise_sd * gen.standard_normal(cfg.n)
    return X, y, beta


def gen_causes_controls(n, p1, p2, alpha1, beta1, rng: RngStream):
    """Many-causes / many-controls design.

    The first p1 columns are candidate causes, the next p2 are controls;
    only the first of each enters the outcome:
    y = alpha1 * D[:, 0] + beta1 * W[:, 0] + noise.

    Returns (X, y, roles) where roles is a list of "target"/"control" tags.
    """
    if p1 < 1 or p2 < 1:
        raise ValueError("p1 and p2 must be >= 1")
    gen = rng.generator()
    D = gen.standard_normal((n, p1))
    W = gen.standard_normal((n, p2))
    y = alpha1 * D[:, 0] + beta1 * W[:, 0] + gen.standard_normal(n)
    X = np.hstack([D, W])
    roles = ["target"] * p1 + ["control"] * p2
    return X, y, roles


def draw_multipliers(kind: str, m: int, rng: RngStream) -> np.ndarray:
    """Mean-zero unit-variance bootstrap multipliers.

    kind="normal": iid N(0,1).  kind="bayes": centered standard exponential
    (E - 1).  kind="wild": Rademacher (+/-1 with equal probability).
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    gen = rng.generator()
    if kind == "normal":
        return gen.standard_normal(m)
    if kind == "bayes":
        return gen.standard_exponential(m) - 1.0
    if kind == "wild":
        return gen.integers(0, 2, size=m) * 2.0 - 1.0
    raise ValueError(f"unknown multiplier kind: {kind!r}")
