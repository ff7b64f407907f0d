"""Traditional coverage backtests with a three-zone outcome.

Both tests check whether a single set of forecasts is correct; neither
compares models.  Zone boundaries follow the Basel traffic-light
cumulative probabilities (0.95 for yellow, 0.9999 for red) and only flag
risk understatement.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import binom

from .comparative import Zone
from .measures import LevelLike, RiskLevel, as_level, normal_cdf

__all__ = [
    "TrafficLightConfig",
    "CoverageResult",
    "traffic_light_bounds",
    "traffic_light_zone",
    "traffic_light_var",
    "severities",
    "es_coverage_statistic",
    "es_coverage_test",
]

GREEN_CUM = 0.95
RED_CUM = 0.9999


@dataclass(frozen=True)
class TrafficLightConfig:
    level: RiskLevel = RiskLevel(0.01)
    n: int = 250
    green_cum: float = GREEN_CUM
    red_cum: float = RED_CUM

    def __post_init__(self) -> None:
        object.__setattr__(self, "level", as_level(self.level))
        if self.n < 1:
            raise ValueError("window length must be positive")
        if not 0.0 < self.green_cum < self.red_cum < 1.0:
            raise ValueError("need 0 < green_cum < red_cum < 1")


@dataclass(frozen=True)
class CoverageResult:
    statistic: float
    zone: Zone
    p_value: float
    test: str = ""

    def to_dict(self) -> dict:
        out = asdict(self)
        out["zone"] = self.zone.value
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "CoverageResult":
        data = dict(data)
        data["zone"] = Zone(data["zone"])
        return cls(**data)


def traffic_light_bounds(cfg: TrafficLightConfig) -> tuple[int, int]:
    """``(k_green, k_red)``: Green for ``k <= k_green``, Red for ``k >= k_red``.

    ``k_green`` is the largest count whose cumulative binomial probability
    stays below ``green_cum``; ``k_red`` the smallest whose cumulative
    probability reaches ``red_cum``.
    """
    ks = np.arange(cfg.n + 1)
    cdf = binom.cdf(ks, cfg.n, cfg.level.alpha)
    below = ks[cdf < cfg.green_cum]
    k_green = int(below[-1]) if below.size else -1
    reached = ks[cdf >= cfg.red_cum]
    k_red = int(reached[0]) if reached.size else cfg.n + 1
    return k_green, k_red


def traffic_light_zone(k: int, cfg: TrafficLightConfig) -> Zone:
    k_green, k_red = traffic_light_bounds(cfg)
    if k <= k_green:
        return Zone.GREEN
    if k >= k_red:
        return Zone.RED
    return Zone.YELLOW


def traffic_light_var(cfg: TrafficLightConfig, v, x) -> CoverageResult:
    """Count ``x_t <= v_t`` over the window and grade the count.

    The p-value is ``P(K >= k)`` for ``K ~ Binomial(n, alpha)``.
    """
    v = np.asarray(v, dtype=float).ravel()
    x = np.asarray(x, dtype=float).ravel()
    if v.size != x.size:
        raise ValueError(f"length mismatch: {v.size} forecasts vs {x.size} realizations")
    if x.size != cfg.n:
        raise ValueError(f"expected {cfg.n} periods, got {x.size}")
    k = int(np.count_nonzero(x <= v))
    return CoverageResult(
        statistic=float(k),
        zone=traffic_light_zone(k, cfg),
        p_value=float(binom.sf(k - 1, cfg.n, cfg.level.alpha)),
        test="traffic_light_var",
    )


def severities(level: LevelLike, pits) -> np.ndarray:
    """Tail breach depth ``(1 - u/alpha) * 1{u <= alpha}``, in [0, 1]."""
    alpha = as_level(level).alpha
    u = np.asarray(pits, dtype=float)
    if np.any(~np.isfinite(u)) or np.any((u < 0.0) | (u > 1.0)):
        raise ValueError("PIT values must lie in [0, 1]")
    return np.where(u <= alpha, 1.0 - u / alpha, 0.0)


def es_coverage_statistic(level: LevelLike, pits) -> float:
    """Standardized mean severity.

    Under a correct model the PITs are iid uniform, each severity has mean
    ``alpha/2`` and variance ``alpha/3 - alpha**2/4``.
    """
    alpha = as_level(level).alpha
    s = severities(alpha, pits)
    n = s.shape[-1]
    null_sd = math.sqrt((alpha / 3.0 - alpha**2 / 4.0) / n)
    return (np.mean(s, axis=-1) - alpha / 2.0) / null_sd


def es_coverage_test(level: LevelLike, pits, n: int | None = None) -> CoverageResult:
    pits = np.asarray(pits, dtype=float).ravel()
    if n is not None and pits.size != n:
        raise ValueError(f"expected {n} PIT values, got {pits.size}")
    if pits.size == 0:
        raise ValueError("need at least one PIT value")
    z = float(es_coverage_statistic(level, pits))
    cum = float(normal_cdf(z))
    if cum < GREEN_CUM:
        zone = Zone.GREEN
    elif cum < RED_CUM:
        zone = Zone.YELLOW
    else:
        zone = Zone.RED
    return CoverageResult(
        statistic=z,
        zone=zone,
        p_value=float(normal_cdf(-z)),
        test="es_coverage",
    )
