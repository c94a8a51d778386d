"""
Choosing the number of groups with ICL
======================================

Setting A3' has three planted groups.  We fit one to five groups and keep
the value maximizing the integrated classification likelihood.
"""

from hyperblock import FitConfig, make_scenario, sample_hsbm, scenario_model, select_q
from hyperblock.selection import icl_table_csv

truth = scenario_model(make_scenario("A3'"), n=100)
H, z = sample_hsbm(truth, n=100, seed=1)

selection = select_q(H, range(1, 6), FitConfig(seed=0))
print(icl_table_csv(selection))
print("selected number of groups:", selection.best_q)

# The penalty grows quickly with q for the full model, so extra groups
# must buy a large likelihood gain to be kept.
for q, score in selection.scores.items():
    print(q, round(score.loglik_complete, 1), round(score.penalty, 1))
