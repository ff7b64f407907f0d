"""Consistent scoring functions for VaR and for the pair (VaR, ES).

The VaR score is the generalized piecewise linear loss

    S(v, x) = (1{x <= v} - alpha) * (G(v) - G(x))

and the joint score adds a term driven by a second increasing function
``G2`` with antiderivative ``H2``:

    S(v, e, x) = (1{x <= v} - alpha) * (G1(v) - G1(x))
                 + G2(e) * 1{x <= v} * (v - x) / alpha
                 + G2(e) * (e - v) - H2(e)

``G1``/``G2`` are restricted to a closed set of choices, each carrying its
exact antiderivative.  Lower scores are better.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy.special import expit

from .measures import (
    Distribution,
    Empirical,
    LevelLike,
    Normal,
    RiskLevel,
    as_level,
    es_of,
    normal_cdf,
    normal_pdf,
    var_of,
)

__all__ = [
    "GChoice",
    "ScoringSpec",
    "UnsupportedCombinationError",
    "score_var",
    "score_var_es",
    "score_series",
    "mean_score",
    "expected_score",
    "expected_score_grid",
    "grid_axis",
    "ElicitabilityCheck",
    "verify_elicitability",
]


class UnsupportedCombinationError(ValueError):
    """Raised when an expected score would diverge or cannot be evaluated."""


class GChoice(str, enum.Enum):
    IDENTITY = "identity"
    EXPONENTIAL = "exponential"
    BOUNDED_LOGISTIC = "logistic"
    ZERO = "zero"

    def g(self, x):
        x = np.asarray(x, dtype=float)
        if self is GChoice.IDENTITY:
            out = x
        elif self is GChoice.EXPONENTIAL:
            out = np.exp(x)
        elif self is GChoice.BOUNDED_LOGISTIC:
            out = expit(x)
        else:
            out = np.zeros_like(x)
        return out[()] if out.ndim == 0 else out

    def antiderivative(self, x):
        x = np.asarray(x, dtype=float)
        if self is GChoice.IDENTITY:
            out = 0.5 * x * x
        elif self is GChoice.EXPONENTIAL:
            out = np.exp(x)
        elif self is GChoice.BOUNDED_LOGISTIC:
            # log(1 + e^x) without overflow
            out = np.logaddexp(0.0, x)
        else:
            out = np.zeros_like(x)
        return out[()] if out.ndim == 0 else out

    @property
    def strictly_increasing(self) -> bool:
        return self is not GChoice.ZERO

    @property
    def vanishes_at_minus_infinity(self) -> bool:
        return self is not GChoice.IDENTITY


@dataclass(frozen=True)
class ScoringSpec:
    """Risk level plus the (G1, G2) pair defining the joint score.

    ``g2=GChoice.ZERO`` turns the joint score into the plain VaR score
    built from ``g1``.
    """

    level: RiskLevel
    g1: GChoice = GChoice.IDENTITY
    g2: GChoice = GChoice.BOUNDED_LOGISTIC

    def __post_init__(self) -> None:
        object.__setattr__(self, "level", as_level(self.level))
        object.__setattr__(self, "g1", GChoice(self.g1))
        object.__setattr__(self, "g2", GChoice(self.g2))
        if not self.g1.strictly_increasing:
            raise ValueError("g1 must be strictly increasing")
        if not self.g2.vanishes_at_minus_infinity:
            raise ValueError(f"g2={self.g2.value} does not vanish at -infinity")

    @property
    def alpha(self) -> float:
        return self.level.alpha

    @property
    def var_only(self) -> bool:
        return self.g2 is GChoice.ZERO


def _scalar_or_array(out: np.ndarray):
    return float(out) if out.ndim == 0 else out


def score_var(g: GChoice, level: LevelLike, v, x):
    """Generalized piecewise linear score for the ``alpha``-quantile."""
    alpha = as_level(level).alpha
    g = GChoice(g)
    v = np.asarray(v, dtype=float)
    x = np.asarray(x, dtype=float)
    hit = (x <= v).astype(float)
    return _scalar_or_array((hit - alpha) * (g.g(v) - g.g(x)))


def score_var_es(spec: ScoringSpec, v, e, x):
    """Joint (VaR, ES) score; broadcasts over array inputs."""
    base = score_var(spec.g1, spec.level, v, x)
    if spec.var_only:
        return base
    alpha = spec.alpha
    v = np.asarray(v, dtype=float)
    e = np.asarray(e, dtype=float)
    x = np.asarray(x, dtype=float)
    g2e = spec.g2.g(e)
    tail = np.where(x <= v, v - x, 0.0)
    out = base + g2e * tail / alpha + g2e * (e - v) - spec.g2.antiderivative(e)
    return _scalar_or_array(np.asarray(out))


def _split_forecasts(forecasts, realizations):
    f = np.asarray(forecasts, dtype=float)
    x = np.asarray(realizations, dtype=float).ravel()
    if f.ndim != 2 or f.shape[1] != 2:
        raise ValueError(f"forecasts must have shape (N, 2), got {f.shape}")
    if f.shape[0] != x.size:
        raise ValueError(
            f"length mismatch: {f.shape[0]} forecasts vs {x.size} realizations"
        )
    if x.size == 0:
        raise ValueError("need at least one period")
    return f[:, 0], f[:, 1], x


def score_series(spec: ScoringSpec, forecasts, realizations) -> np.ndarray:
    """Per-period scores for ``forecasts`` of shape (N, 2) holding (v, e)."""
    v, e, x = _split_forecasts(forecasts, realizations)
    s = np.atleast_1d(np.asarray(score_var_es(spec, v, e, x), dtype=float))
    if not np.all(np.isfinite(s)):
        raise ValueError("score series contains non-finite values")
    return s


def mean_score(spec: ScoringSpec, forecasts, realizations) -> float:
    return float(np.mean(score_series(spec, forecasts, realizations)))


# ---------------------------------------------------------------------------
# expected scores

_QUAD_OPTS = dict(epsabs=1e-11, epsrel=1e-12, limit=200)


def _normal_bounds(g1: GChoice, dist: Normal) -> tuple[float, float]:
    lo = dist.mu - 10.0 * dist.sigma
    hi = dist.mu + 10.0 * dist.sigma
    if g1 is GChoice.EXPONENTIAL:
        # e^x tilts the normal mass to mu + sigma^2
        if dist.mu + 0.5 * dist.sigma**2 > 700.0:
            raise UnsupportedCombinationError(
                "exponential g1: E[exp(X)] overflows for this normal distribution"
            )
        hi += dist.sigma**2
    return lo, hi


def _normal_v_terms(g1: GChoice, alpha: float, dist: Normal, v: float):
    """Quadrature for E[(1{X<=v} - a)(G1(v) - G1(X))] and E[1{X<=v}(v - X)]."""
    lo, hi = _normal_bounds(g1, dist)
    mu, sigma = dist.mu, dist.sigma
    g1v = float(g1.g(v))

    def dens(x):
        return normal_pdf((x - mu) / sigma) / sigma

    def below(x):
        return (1.0 - alpha) * (g1v - float(g1.g(x))) * dens(x)

    def above(x):
        return -alpha * (g1v - float(g1.g(x))) * dens(x)

    cut = min(max(v, lo), hi)
    a_term = 0.0
    b_term = 0.0
    if cut > lo:
        a_term += integrate.quad(below, lo, cut, **_QUAD_OPTS)[0]
        b_term += integrate.quad(lambda x: (v - x) * dens(x), lo, cut, **_QUAD_OPTS)[0]
    if cut < hi:
        a_term += integrate.quad(above, cut, hi, **_QUAD_OPTS)[0]
    return a_term, b_term


def _empirical_v_terms(g1: GChoice, alpha: float, dist: Empirical, v):
    """Exact sums of the two v-dependent expectations, vectorized over v."""
    v = np.atleast_1d(np.asarray(v, dtype=float))[:, None]
    xs = dist.sample[None, :]
    hit = xs <= v
    if g1 is GChoice.EXPONENTIAL and np.max(dist.sample) > 700.0:
        raise UnsupportedCombinationError("exponential g1 overflows on this sample")
    a_term = np.mean((hit - alpha) * (g1.g(v) - g1.g(xs)), axis=1)
    b_term = np.mean(np.where(hit, v - xs, 0.0), axis=1)
    return a_term, b_term


def _v_terms(spec: ScoringSpec, dist: Distribution, v_values):
    v_values = np.atleast_1d(np.asarray(v_values, dtype=float))
    if isinstance(dist, Normal):
        pairs = [_normal_v_terms(spec.g1, spec.alpha, dist, float(v)) for v in v_values]
        a_term, b_term = (np.array(t) for t in zip(*pairs))
        return a_term, b_term
    if isinstance(dist, Empirical):
        return _empirical_v_terms(spec.g1, spec.alpha, dist, v_values)
    raise UnsupportedCombinationError(
        f"no expected score for distribution {type(dist).__name__}"
    )


def _combine(spec: ScoringSpec, v, e, a_term, b_term):
    if spec.var_only:
        return a_term + 0.0 * e
    g2e = spec.g2.g(e)
    return a_term + g2e * (b_term / spec.alpha + e - v) - spec.g2.antiderivative(e)


def expected_score(spec: ScoringSpec, dist: Distribution, v: float, e: float) -> float:
    """``E[S(v, e, X)]`` by quadrature (normal) or exact summation (empirical).

    The expectation splits into two functions of ``v`` alone; ``e`` then
    enters in closed form.  Normal integrals are split at ``v``, where the
    integrand has a kink, and truncated ten standard deviations out.
    """
    a_term, b_term = _v_terms(spec, dist, [v])
    return float(_combine(spec, float(v), float(e), a_term[0], b_term[0]))


def expected_score_grid(spec: ScoringSpec, dist: Distribution, v_grid, e_grid) -> np.ndarray:
    """Expected scores on the product grid, shape ``(len(v_grid), len(e_grid))``."""
    v_grid = np.asarray(v_grid, dtype=float).ravel()
    e_grid = np.asarray(e_grid, dtype=float).ravel()
    a_term, b_term = _v_terms(spec, dist, v_grid)
    return _combine(
        spec, v_grid[:, None], e_grid[None, :], a_term[:, None], b_term[:, None]
    )


def grid_axis(lo: float, hi: float, step: float) -> np.ndarray:
    """Evenly spaced points ``lo, lo + step, ..., hi`` without drift."""
    if step <= 0 or hi < lo:
        raise ValueError("need step > 0 and hi >= lo")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(count)


@dataclass(frozen=True)
class ElicitabilityCheck:
    argmin: tuple[float, float]
    true_pair: tuple[float, float]
    gap: float
    min_score: float
    true_score: float
    scores: np.ndarray = field(repr=False, compare=False)

    @property
    def truth_attains_minimum(self) -> bool:
        """True score equals the grid minimum up to rounding."""
        scale = max(1.0, abs(self.min_score))
        return self.true_score <= self.min_score + 1e-12 * scale


def verify_elicitability(
    spec: ScoringSpec,
    dist: Distribution,
    v_grid,
    e_grid=None,
    include_truth: bool = False,
) -> ElicitabilityCheck:
    """Minimize the expected score over a grid and compare with (VaR, ES).

    ``gap`` is the sup-norm distance between the grid argmin and the true
    pair.  With ``include_truth`` the true coordinates are inserted into the
    axes so the true pair is itself a candidate.
    """
    v_grid = np.asarray(v_grid, dtype=float).ravel()
    e_grid = v_grid if e_grid is None else np.asarray(e_grid, dtype=float).ravel()
    true_v = var_of(dist, spec.level)
    true_e = es_of(dist, spec.level)
    if include_truth:
        v_grid = np.union1d(v_grid, [true_v])
        e_grid = np.union1d(e_grid, [true_e])
    scores = expected_score_grid(spec, dist, v_grid, e_grid)
    i, j = np.unravel_index(np.argmin(scores), scores.shape)
    argmin = (float(v_grid[i]), float(e_grid[j]))
    gap = max(abs(argmin[0] - true_v), abs(argmin[1] - true_e))
    return ElicitabilityCheck(
        argmin=argmin,
        true_pair=(true_v, true_e),
        gap=gap,
        min_score=float(scores[i, j]),
        true_score=expected_score(spec, dist, true_v, true_e),
        scores=scores,
    )
