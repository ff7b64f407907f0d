# %% [markdown]
# # VaR and ES of predictive distributions
#
# Returns are modelled directly, so both risk measures sit in the lower
# tail and come out negative.

# %%
import math

import numpy as np

from esbacktest import Empirical, Normal, es_of, normal_risk_pair, pit, var_of

# %%
for alpha in (0.01, 0.025, 0.05):
    d = Normal(0.0, 1.0)
    print(f"N(0,1)  alpha={alpha:<6} VaR={var_of(d, alpha):+.6f}  ES={es_of(d, alpha):+.6f}")

# %% [markdown]
# The uninformed forecaster in the simulation study uses N(0, 2), i.e.
# standard deviation sqrt(2).

# %%
print(normal_risk_pair(0.0, math.sqrt(2.0), 0.025))

# %% [markdown]
# Empirical distributions use the left-continuous quantile and an exact
# step-function average for ES.

# %%
sample = Empirical(np.random.default_rng(0).standard_normal(1000))
print("empirical VaR/ES at 2.5%:", var_of(sample, 0.025), es_of(sample, 0.025))
print("PIT of 0 under N(0,1):", pit(Normal(), 0.0))
