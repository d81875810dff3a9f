"""Seeded random elements for property checks and the acceptance suite."""

from __future__ import annotations

import numpy as np

from .kernels import Interval, SeparableFn, UnivariateFn
from .star import StarElement


def random_univariate(domain: Interval, rng: np.random.Generator, degree: int = 3, scale: float = 1.0) -> UnivariateFn:
    """Chebyshev coefficients drawn uniformly from ``[-scale, scale]``, decaying with index."""
    c = rng.uniform(-scale, scale, degree + 1) / (1.0 + np.arange(degree + 1)) ** 2
    return UnivariateFn(domain, c)


def random_separable(
    domain: Interval, rng: np.random.Generator, rank: int = 2, degree: int = 3, scale: float = 1.0
) -> SeparableFn:
    terms = [
        (random_univariate(domain, rng, degree, scale), random_univariate(domain, rng, degree, 1.0))
        for _ in range(rank)
    ]
    return SeparableFn.from_terms(domain, terms)


def random_element(
    domain: Interval,
    rng: np.random.Generator,
    max_order: int = 2,
    rank: int = 2,
    degree: int = 3,
    scale: float = 1.0,
) -> StarElement:
    """Random causal element with a coefficient at every order ``-1 .. max_order``."""
    parts = {k: random_separable(domain, rng, rank, degree, scale) for k in range(-1, max_order + 1)}
    return StarElement(domain, parts)


def random_theta_element(
    domain: Interval, rng: np.random.Generator, rank: int = 2, degree: int = 3, scale: float = 1.0
) -> StarElement:
    return StarElement(domain, {-1: random_separable(domain, rng, rank, degree, scale)})
