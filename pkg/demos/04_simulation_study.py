# %% [markdown]
# # Traditional versus comparative backtests
#
# Scenario A: the internal model is the informed one, and every test
# should land in green most of the time.  Scenario B: the internal model
# is the uninformed one.  It is still unconditionally correct, so the
# traditional tests pass it, while the comparative tests send it to red.
#
# Each scenario takes a few seconds at the default 10,000 replications.

# %%
from esbacktest import ScenarioConfig, run_experiment

for scenario, seed in (("A", 1), ("B", 2)):
    summary = run_experiment(ScenarioConfig(scenario=scenario, seed=seed))
    print(summary.format_table(f"Scenario {scenario} (percent of decisions)"))
    print()
