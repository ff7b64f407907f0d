"""Diebold-Mariano comparative backtests with a three-zone decision.

The internal forecasts are scored against the standard procedure's
forecasts on the same realizations.  With ``d_t`` the score difference
(internal minus standard), the statistic ``t2 = mean(d) / sigma_n`` is
referred to the standard normal distribution:

* Green: ``t2 <= -z`` -- the hypothesis "internal is at most as good as
  standard" is rejected, so the internal model is demonstrably better.
* Red: ``t2 >= z`` -- "internal is at least as good" is rejected.
* Yellow otherwise.

Here ``z`` is the ``1 - eta`` standard normal quantile.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .measures import LevelLike, normal_cdf, normal_quantile
from .scoring import GChoice, ScoringSpec, score_var, score_var_es

__all__ = [
    "Zone",
    "DegenerateSeriesError",
    "ForecastRecord",
    "ForecastSeries",
    "IidSample",
    "NeweyWest",
    "ComparativeResult",
    "long_run_sigma",
    "dm_from_differences",
    "dm_statistic",
    "zone_for_statistic",
    "comparative_backtest",
    "comparative_backtest_var",
]


class Zone(str, enum.Enum):
    GREEN = "green"
    YELLOW = "yellow"
    RED = "red"

    def mirrored(self) -> "Zone":
        return {Zone.GREEN: Zone.RED, Zone.RED: Zone.GREEN}.get(self, self)


class DegenerateSeriesError(ValueError):
    """The score differences have zero spread, so ``t2`` is undefined."""


@dataclass(frozen=True)
class ForecastRecord:
    x: float
    v: float
    e: float
    v_star: float
    e_star: float


@dataclass(frozen=True, eq=False)
class ForecastSeries:
    """Column-wise storage of realizations and both sets of forecasts.

    The ES columns may be omitted for VaR-only comparisons.
    """

    x: np.ndarray
    v: np.ndarray
    e: Optional[np.ndarray]
    v_star: np.ndarray
    e_star: Optional[np.ndarray]

    def __post_init__(self) -> None:
        if (self.e is None) != (self.e_star is None):
            raise ValueError("supply both ES columns or neither")
        cols = {}
        for name in ("x", "v", "e", "v_star", "e_star"):
            if getattr(self, name) is None:
                continue
            arr = np.atleast_1d(np.asarray(getattr(self, name), dtype=float)).ravel()
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"column {name!r} contains non-finite values")
            cols[name] = arr
        lengths = {name: arr.size for name, arr in cols.items()}
        if len(set(lengths.values())) != 1:
            raise ValueError(f"column lengths differ: {lengths}")
        for name, arr in cols.items():
            object.__setattr__(self, name, arr)

    @classmethod
    def from_records(cls, records: Iterable[ForecastRecord]) -> "ForecastSeries":
        rows = list(records)
        return cls(
            x=[r.x for r in rows],
            v=[r.v for r in rows],
            e=[r.e for r in rows],
            v_star=[r.v_star for r in rows],
            e_star=[r.e_star for r in rows],
        )

    @property
    def has_es(self) -> bool:
        return self.e is not None

    def records(self) -> list[ForecastRecord]:
        if not self.has_es:
            raise ValueError("series has no ES columns")
        rows = zip(self.x, self.v, self.e, self.v_star, self.e_star)
        return [ForecastRecord(*map(float, row)) for row in rows]

    def swapped(self) -> "ForecastSeries":
        """Exchange the roles of internal and standard forecasts."""
        return ForecastSeries(self.x, self.v_star, self.e_star, self.v, self.e)

    def __len__(self) -> int:
        return int(self.x.size)


SeriesLike = Union[ForecastSeries, Sequence[ForecastRecord]]


def _checked_series(records: SeriesLike) -> ForecastSeries:
    if not isinstance(records, ForecastSeries):
        records = ForecastSeries.from_records(records)
    if len(records) < 2:
        raise ValueError("comparative backtest needs N >= 2")
    return records


@dataclass(frozen=True)
class IidSample:
    """Sample standard deviation (divisor ``N - 1``) over ``sqrt(N)``."""

    def describe(self) -> str:
        return "iid"


@dataclass(frozen=True)
class NeweyWest:
    """Bartlett-weighted long-run variance with ``lag`` autocovariances."""

    lag: int

    def __post_init__(self) -> None:
        if int(self.lag) != self.lag or self.lag < 0:
            raise ValueError(f"lag must be a nonnegative integer, got {self.lag!r}")

    def describe(self) -> str:
        return f"nw:{self.lag}"


VarianceEstimator = Union[IidSample, NeweyWest]


def long_run_sigma(d, var_est: VarianceEstimator = IidSample()) -> float:
    """Estimated standard deviation of ``mean(d)``."""
    d = np.asarray(d, dtype=float)
    n = d.size
    if n < 2:
        raise ValueError("need at least two periods")
    if isinstance(var_est, IidSample):
        return float(np.std(d, ddof=1) / math.sqrt(n))
    if isinstance(var_est, NeweyWest):
        if var_est.lag >= n:
            raise ValueError(f"lag {var_est.lag} must be smaller than N={n}")
        c = d - d.mean()
        lrv = c @ c / n
        for j in range(1, var_est.lag + 1):
            weight = 1.0 - j / (var_est.lag + 1)
            lrv += 2.0 * weight * (c[j:] @ c[:-j]) / n
        # Bartlett weights keep lrv >= 0 up to rounding
        return float(math.sqrt(max(lrv, 0.0) / n))
    raise TypeError(f"unknown variance estimator {var_est!r}")


def dm_from_differences(d, var_est: VarianceEstimator = IidSample()) -> tuple[float, float]:
    """``(t2, sigma_n)`` for a series of score differences."""
    d = np.asarray(d, dtype=float).ravel()
    if not np.all(np.isfinite(d)):
        raise ValueError("score differences must be finite")
    sigma_n = long_run_sigma(d, var_est)
    scale = float(np.max(np.abs(d))) if d.size else 0.0
    if not sigma_n > 0.0 or sigma_n <= np.finfo(float).eps * scale:
        raise DegenerateSeriesError(
            "score differences have no spread (identical forecasts or coinciding scores)"
        )
    return float(np.mean(d) / sigma_n), sigma_n


def _score_columns(spec: ScoringSpec, series: ForecastSeries):
    if not spec.var_only and not series.has_es:
        raise ValueError("joint scoring needs the e and e_star columns")
    internal = np.atleast_1d(score_var_es(spec, series.v, series.e, series.x))
    standard = np.atleast_1d(score_var_es(spec, series.v_star, series.e_star, series.x))
    return internal, standard


def dm_statistic(
    spec: ScoringSpec,
    records: SeriesLike,
    var_est: VarianceEstimator = IidSample(),
) -> tuple[float, float]:
    series = _checked_series(records)
    internal, standard = _score_columns(spec, series)
    return dm_from_differences(internal - standard, var_est)


def zone_for_statistic(t2: float, eta: float = 0.05) -> Zone:
    z = float(normal_quantile(1.0 - eta))
    if t2 <= -z:
        return Zone.GREEN
    if t2 >= z:
        return Zone.RED
    return Zone.YELLOW


@dataclass(frozen=True)
class ComparativeResult:
    t2: float
    sigma_n: float
    p_superior: float
    p_inferior: float
    zone: Zone
    n: int
    mean_score_internal: float
    mean_score_standard: float
    eta: float = 0.05

    def to_dict(self) -> dict:
        out = asdict(self)
        out["zone"] = self.zone.value
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ComparativeResult":
        data = dict(data)
        data["zone"] = Zone(data["zone"])
        return cls(**data)


def _check_eta(eta: float) -> None:
    if not 0.0 < eta < 0.5:
        raise ValueError(f"test level must lie in (0, 0.5), got {eta!r}")


def _result(internal, standard, var_est, eta) -> ComparativeResult:
    t2, sigma_n = dm_from_differences(internal - standard, var_est)
    return ComparativeResult(
        t2=t2,
        sigma_n=sigma_n,
        p_superior=float(normal_cdf(-t2)),
        p_inferior=float(normal_cdf(t2)),
        zone=zone_for_statistic(t2, eta),
        n=int(internal.size),
        mean_score_internal=float(np.mean(internal)),
        mean_score_standard=float(np.mean(standard)),
        eta=eta,
    )


def comparative_backtest(
    spec: ScoringSpec,
    records: SeriesLike,
    var_est: VarianceEstimator = IidSample(),
    eta: float = 0.05,
) -> ComparativeResult:
    """Score both forecast sets with ``spec`` and classify the outcome.

    ``p_superior`` is the p-value against "internal at least as good"
    (small when the internal model looks worse); ``p_inferior`` is the
    p-value against "internal at most as good" (small when it looks better).
    """
    _check_eta(eta)
    internal, standard = _score_columns(spec, _checked_series(records))
    return _result(internal, standard, var_est, eta)


def comparative_backtest_var(
    g: GChoice,
    level: LevelLike,
    records: SeriesLike,
    var_est: VarianceEstimator = IidSample(),
    eta: float = 0.05,
) -> ComparativeResult:
    """VaR-only comparison with the piecewise linear score; ES columns unused."""
    _check_eta(eta)
    series = _checked_series(records)
    internal = np.atleast_1d(score_var(g, level, series.v, series.x))
    standard = np.atleast_1d(score_var(g, level, series.v_star, series.x))
    return _result(internal, standard, var_est, eta)
