# %% [markdown]
# # Comparative backtest on one sample
#
# An informed internal model (knows the conditional mean) is compared
# against an uninformed standard model.  Negative T2 favours the internal
# model; the zone follows from one-sided tests at level 0.05.

# %%
import math

import numpy as np

from esbacktest import (
    ForecastSeries,
    GChoice,
    NeweyWest,
    ScoringSpec,
    comparative_backtest,
    comparative_backtest_var,
    normal_risk_pair,
)

rng = np.random.default_rng(1)
n = 250
mu = rng.standard_normal(n)
x = mu + rng.standard_normal(n)

inf = normal_risk_pair(0.0, 1.0, 0.025)
unc = normal_risk_pair(0.0, math.sqrt(2.0), 0.025)
series = ForecastSeries(x, mu + inf.var, mu + inf.es, np.full(n, unc.var), np.full(n, unc.es))

# %%
spec = ScoringSpec(0.025, GChoice.IDENTITY, GChoice.BOUNDED_LOGISTIC)
res = comparative_backtest(spec, series)
print(f"T2={res.t2:+.3f}  p(H0-)={res.p_superior:.4f}  p(H0+)={res.p_inferior:.4f}  zone={res.zone.value}")

# %% [markdown]
# Swapping roles mirrors the decision.  A HAC variance estimate is
# available for serially dependent score differences.

# %%
print("swapped:", comparative_backtest(spec, series.swapped()).zone.value)
print("Newey-West(5):", comparative_backtest(spec, series, NeweyWest(5)).zone.value)
print("VaR only:", comparative_backtest_var(GChoice.IDENTITY, 0.025, series).zone.value)
