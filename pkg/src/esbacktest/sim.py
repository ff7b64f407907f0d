"""Monte Carlo study of traditional versus comparative backtests.

Each period draws ``mu_t ~ N(0, 1)`` and ``x_t ~ N(mu_t, 1)``.  One
forecaster knows ``mu_t`` and issues forecasts from ``N(mu_t, 1)``; the
other only knows the unconditional law ``N(0, 2)``.  In scenario A the
informed forecaster is the internal model and the uninformed one is the
standard procedure; scenario B swaps them.

Replication ``r`` draws from its own stream seeded by ``(seed, r)``, so
any replication can be recomputed on its own and the two scenarios see
identical data for the same seed.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .comparative import (
    ComparativeResult,
    ForecastSeries,
    IidSample,
    Zone,
    comparative_backtest,
    comparative_backtest_var,
)
from .measures import RiskLevel, as_level, normal_cdf, normal_risk_pair
from .scoring import GChoice, ScoringSpec
from .traditional import CoverageResult, TrafficLightConfig, es_coverage_test, traffic_light_var

__all__ = [
    "Scenario",
    "ScenarioConfig",
    "TESTS",
    "ReplicationData",
    "ReplicationOutcome",
    "ZoneSummary",
    "replication_rng",
    "simulate_data",
    "run_replication",
    "run_experiment",
]

SQRT2 = math.sqrt(2.0)

TESTS = ("traditional_var", "traditional_es", "comparative_var", "comparative_joint")
TEST_LABELS = {
    "traditional_var": ("Traditional", "VaR_0.01"),
    "traditional_es": ("Traditional", "ES_0.025"),
    "comparative_var": ("Comparative", "VaR_0.01"),
    "comparative_joint": ("Comparative", "(VaR_0.025, ES_0.025)"),
}


class Scenario(str, enum.Enum):
    A = "A"
    B = "B"


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: Scenario = Scenario.A
    n: int = 250
    reps: int = 10_000
    seed: int = 0
    eta: float = 0.05
    var_level_tl: RiskLevel = RiskLevel(0.01)
    joint_level: RiskLevel = RiskLevel(0.025)

    def __post_init__(self) -> None:
        object.__setattr__(self, "scenario", Scenario(self.scenario))
        object.__setattr__(self, "var_level_tl", as_level(self.var_level_tl))
        object.__setattr__(self, "joint_level", as_level(self.joint_level))
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if self.reps < 1:
            raise ValueError("reps must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if not 0.0 < self.eta < 0.5:
            raise ValueError("eta must lie in (0, 0.5)")

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario.value,
            "n": self.n,
            "reps": self.reps,
            "seed": self.seed,
            "eta": self.eta,
            "var_level_tl": self.var_level_tl.alpha,
            "joint_level": self.joint_level.alpha,
        }


def replication_rng(seed: int, rep_index: int) -> np.random.Generator:
    """Independent generator for one replication, a pure function of its inputs."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(rep_index,))))


@dataclass(frozen=True, eq=False)
class ReplicationData:
    """Draws of one replication plus both forecasters' output at a level."""

    mu: np.ndarray
    x: np.ndarray

    def forecasts(self, scenario: Scenario, level: RiskLevel) -> ForecastSeries:
        informed = normal_risk_pair(0.0, 1.0, level)
        uninformed = normal_risk_pair(0.0, SQRT2, level)
        v_inf = self.mu + informed.var
        e_inf = self.mu + informed.es
        v_un = np.full_like(self.x, uninformed.var)
        e_un = np.full_like(self.x, uninformed.es)
        if Scenario(scenario) is Scenario.A:
            return ForecastSeries(self.x, v_inf, e_inf, v_un, e_un)
        return ForecastSeries(self.x, v_un, e_un, v_inf, e_inf)

    def internal_pits(self, scenario: Scenario) -> np.ndarray:
        if Scenario(scenario) is Scenario.A:
            return normal_cdf(self.x - self.mu)
        return normal_cdf(self.x / SQRT2)


def simulate_data(n: int, rng: np.random.Generator) -> ReplicationData:
    mu = rng.standard_normal(n)
    x = mu + rng.standard_normal(n)
    return ReplicationData(mu=mu, x=x)


@dataclass(frozen=True)
class ReplicationOutcome:
    rep_index: int
    traditional_var: CoverageResult
    traditional_es: CoverageResult
    comparative_var: ComparativeResult
    comparative_joint: ComparativeResult

    def zones(self) -> dict[str, Zone]:
        return {name: getattr(self, name).zone for name in TESTS}


def run_replication(cfg: ScenarioConfig, rep_index: int) -> ReplicationOutcome:
    """All four backtests on one simulated sample (common data for all)."""
    data = simulate_data(cfg.n, replication_rng(cfg.seed, rep_index))
    tl_series = data.forecasts(cfg.scenario, cfg.var_level_tl)
    joint_series = data.forecasts(cfg.scenario, cfg.joint_level)
    tl_cfg = TrafficLightConfig(level=cfg.var_level_tl, n=cfg.n)
    return ReplicationOutcome(
        rep_index=rep_index,
        traditional_var=traffic_light_var(tl_cfg, tl_series.v, data.x),
        traditional_es=es_coverage_test(cfg.joint_level, data.internal_pits(cfg.scenario)),
        comparative_var=comparative_backtest_var(
            GChoice.IDENTITY, cfg.var_level_tl, tl_series, IidSample(), cfg.eta
        ),
        comparative_joint=comparative_backtest(
            ScoringSpec(cfg.joint_level, GChoice.IDENTITY, GChoice.BOUNDED_LOGISTIC),
            joint_series,
            IidSample(),
            cfg.eta,
        ),
    )


@dataclass(frozen=True)
class ZoneSummary:
    """Zone counts per test, reported as percentages of replications."""

    counts: dict[str, dict[str, int]]
    reps: int

    def pct(self, test: str, zone: Zone | str) -> float:
        return 100.0 * self.counts[test][Zone(zone).value] / self.reps

    def row(self, test: str) -> tuple[float, float, float]:
        return tuple(self.pct(test, z) for z in Zone)  # type: ignore[return-value]

    def to_dict(self) -> dict:
        return {
            "reps": self.reps,
            "counts": {t: dict(c) for t, c in self.counts.items()},
            "percent": {t: dict(zip((z.value for z in Zone), self.row(t))) for t in self.counts},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ZoneSummary":
        counts = {t: {z: int(k) for z, k in c.items()} for t, c in data["counts"].items()}
        return cls(counts=counts, reps=int(data["reps"]))

    @classmethod
    def from_outcomes(cls, outcomes) -> "ZoneSummary":
        tallies = {t: Counter() for t in TESTS}
        reps = 0
        for outcome in outcomes:
            reps += 1
            for test, zone in outcome.zones().items():
                tallies[test][zone.value] += 1
        counts = {t: {z.value: tallies[t][z.value] for z in Zone} for t in TESTS}
        return cls(counts=counts, reps=reps)

    def format_table(self, title: str = "") -> str:
        lines = []
        if title:
            lines.append(title)
        lines.append(f"{'':<12} {'':<22} {'Green':>7} {'Yellow':>7} {'Red':>7}")
        for test in self.counts:
            kind, label = TEST_LABELS.get(test, (test, ""))
            g, y, r = self.row(test)
            lines.append(f"{kind:<12} {label:<22} {g:7.2f} {y:7.2f} {r:7.2f}")
        return "\n".join(lines)


def run_experiment(cfg: ScenarioConfig, workers: int = 1, keep_outcomes: bool = False):
    """Run ``cfg.reps`` replications and tally the zones.

    Replications are independent, so ``workers > 1`` runs them on a thread
    pool; the tally does not depend on the execution order.  With
    ``keep_outcomes`` the per-replication outcomes are returned as well.
    """
    indices = range(cfg.reps)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(lambda r: run_replication(cfg, r), indices))
    else:
        outcomes = [run_replication(cfg, r) for r in indices]
    summary = ZoneSummary.from_outcomes(outcomes)
    return (summary, outcomes) if keep_outcomes else summary
