# %% [markdown]
# # Minimizing the expected joint score
#
# The expected score of the (VaR, ES) scoring function is minimized at
# the true pair.  Below the minimum is located by brute-force grid search
# for a standard normal and for a small empirical distribution.

# %%
from esbacktest import Empirical, GChoice, Normal, ScoringSpec, verify_elicitability
from esbacktest.scoring import grid_axis

spec = ScoringSpec(0.025, GChoice.IDENTITY, GChoice.BOUNDED_LOGISTIC)

# %%
check = verify_elicitability(spec, Normal(0.0, 1.0), grid_axis(-4.0, 0.0, 0.01))
print("grid argmin:", check.argmin)
print("true pair:  ", check.true_pair)
print("sup-norm gap:", round(check.gap, 4))

# %% [markdown]
# For a sample the expectation is an exact finite sum, so the true pair
# (inserted into the grid) attains the minimum exactly.

# %%
dist = Empirical([-2.0, -0.5, 1.0, 3.0])
spec_half = ScoringSpec(0.375, GChoice.IDENTITY, GChoice.BOUNDED_LOGISTIC)
check = verify_elicitability(spec_half, dist, grid_axis(-3.0, 3.0, 0.05), include_truth=True)
print(check.argmin, check.true_pair, check.truth_attains_minimum)

# %% [markdown]
# VaR alone is not enough: with G2 = 0 the expected score ignores the ES
# coordinate entirely.

# %%
from esbacktest import expected_score

var_only = ScoringSpec(0.025, GChoice.IDENTITY, GChoice.ZERO)
print({e: expected_score(var_only, Normal(), -1.96, e) for e in (-3.0, -2.34, 0.0)})
