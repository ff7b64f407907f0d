"""Scoring, comparative and traditional backtests for VaR and Expected Shortfall."""

from .comparative import (
    ComparativeResult,
    DegenerateSeriesError,
    ForecastRecord,
    ForecastSeries,
    IidSample,
    NeweyWest,
    Zone,
    comparative_backtest,
    comparative_backtest_var,
    dm_from_differences,
    dm_statistic,
)
from .measures import (
    Empirical,
    Normal,
    RiskLevel,
    RiskPair,
    es_of,
    normal_risk_pair,
    pit,
    var_of,
)
from .scoring import (
    GChoice,
    ScoringSpec,
    UnsupportedCombinationError,
    expected_score,
    mean_score,
    score_series,
    score_var,
    score_var_es,
    verify_elicitability,
)
from .sim import Scenario, ScenarioConfig, ZoneSummary, run_experiment, run_replication
from .traditional import (
    CoverageResult,
    TrafficLightConfig,
    es_coverage_test,
    traffic_light_var,
)

__version__ = "0.1.0"
