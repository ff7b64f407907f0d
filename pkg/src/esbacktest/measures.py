"""Value at Risk and Expected Shortfall of predictive distributions.

Sign convention: ``X`` is the asset value or return, so losses sit in the
lower tail and both risk measures are usually negative.  Nothing in this
package flips signs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.special import ndtr, ndtri

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class RiskLevel:
    """Probability level ``alpha`` in the open interval (0, 1)."""

    alpha: float

    def __post_init__(self) -> None:
        alpha = float(self.alpha)
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"risk level must lie in (0, 1), got {self.alpha!r}")
        object.__setattr__(self, "alpha", alpha)

    def __float__(self) -> float:
        return self.alpha


LevelLike = Union[RiskLevel, float]


def as_level(level: LevelLike) -> RiskLevel:
    return level if isinstance(level, RiskLevel) else RiskLevel(level)


@dataclass(frozen=True)
class Normal:
    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mu) and math.isfinite(self.sigma)):
            raise ValueError("Normal parameters must be finite")
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma!r}")


@dataclass(frozen=True, eq=False)
class Empirical:
    """Uniform distribution over the atoms of a sample (duplicates allowed).

    The sample is sorted on construction and stored read-only.
    """

    sample: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        arr = np.sort(np.asarray(self.sample, dtype=float).ravel())
        if arr.size == 0:
            raise ValueError("empirical distribution needs at least one point")
        if not np.all(np.isfinite(arr)):
            raise ValueError("empirical sample contains non-finite values")
        arr.setflags(write=False)
        object.__setattr__(self, "sample", arr)

    @property
    def size(self) -> int:
        return int(self.sample.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Empirical):
            return NotImplemented
        return np.array_equal(self.sample, other.sample)

    def __hash__(self) -> int:
        return hash(self.sample.tobytes())

    def __repr__(self) -> str:
        return f"Empirical(n={self.size})"


Distribution = Union[Normal, Empirical]


@dataclass(frozen=True)
class RiskPair:
    var: float
    es: float


def normal_quantile(p):
    """Standard normal quantile; accurate to a few ulps over (0, 1)."""
    return ndtri(p)


def normal_cdf(x):
    return ndtr(x)


def normal_pdf(x):
    x = np.asarray(x, dtype=float)
    return _INV_SQRT_2PI * np.exp(-0.5 * x * x)


def _quantile_index(n: int, alpha: float) -> int:
    """Smallest k in 1..n with k/n >= alpha, compared in floating point."""
    k = max(1, min(n, math.ceil(n * alpha)))
    while k > 1 and (k - 1) / n >= alpha:
        k -= 1
    while k < n and k / n < alpha:
        k += 1
    return k


def var_of(dist: Distribution, level: LevelLike) -> float:
    """Lower ``alpha``-quantile, ``inf{x : P(X <= x) >= alpha}``."""
    alpha = as_level(level).alpha
    if isinstance(dist, Normal):
        return float(dist.mu + dist.sigma * normal_quantile(alpha))
    if isinstance(dist, Empirical):
        return float(dist.sample[_quantile_index(dist.size, alpha) - 1])
    raise TypeError(f"unsupported distribution {type(dist).__name__}")


def es_of(dist: Distribution, level: LevelLike) -> float:
    """Average of the quantiles at levels below ``alpha``.

    For an empirical distribution the quantile function is a step function,
    so the integral is an exact weighted sum of the lowest atoms.
    """
    alpha = as_level(level).alpha
    if isinstance(dist, Normal):
        z = normal_quantile(alpha)
        return float(dist.mu - dist.sigma * normal_pdf(z) / alpha)
    if isinstance(dist, Empirical):
        n = dist.size
        k = _quantile_index(n, alpha)
        xs = dist.sample
        full = xs[: k - 1].sum() / n
        partial = (alpha - (k - 1) / n) * xs[k - 1]
        es = (full + partial) / alpha
        # rounding can push the average a hair above the quantile
        return float(min(es, xs[k - 1]))
    raise TypeError(f"unsupported distribution {type(dist).__name__}")


def normal_risk_pair(mu: float, sigma: float, level: LevelLike) -> RiskPair:
    """Closed-form (VaR, ES) of ``N(mu, sigma**2)``."""
    dist = Normal(mu, sigma)
    return RiskPair(var_of(dist, level), es_of(dist, level))


def risk_pair(dist: Distribution, level: LevelLike) -> RiskPair:
    return RiskPair(var_of(dist, level), es_of(dist, level))


def pit(dist: Distribution, x):
    """Predictive CDF evaluated at the realization(s) ``x``."""
    if isinstance(dist, Normal):
        u = normal_cdf((np.asarray(x, dtype=float) - dist.mu) / dist.sigma)
    elif isinstance(dist, Empirical):
        u = np.searchsorted(dist.sample, x, side="right") / dist.size
    else:
        raise TypeError(f"unsupported distribution {type(dist).__name__}")
    return float(u) if np.ndim(u) == 0 else u
