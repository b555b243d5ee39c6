"""
Exact randomized p-values
=========================

For discrete families the two-sided p-value is randomized with an auxiliary
uniform variate, which makes it exactly uniform under the null.
"""

import numpy as np
from scipy import stats

from hetdetect.expfam import GAUSSIAN, POISSON
from hetdetect.pvalues import null_tail, pvalues_for_dataset, two_sided_pvalue

# %%
# A single Poisson p-value at ``k = 2``, ``y = 2``, with and without the
# randomization variate.
print("u = 0   :", two_sided_pvalue(POISSON, 2, 2, u=0.0))
print("u = 0.9 :", two_sided_pvalue(POISSON, 2, 2, u=0.9))
print("closed  :", two_sided_pvalue(POISSON, 2, 2, randomize=False))

# %%
# Null uniformity over 1e5 draws with mixed sample sizes.
rng = np.random.default_rng(0)
K = rng.integers(1, 12, 100_000)
Y = rng.poisson(K).astype(float)
p = pvalues_for_dataset(POISSON, Y, K, seed=1).p
print("KS against Uniform(0,1):", stats.kstest(p, "uniform"))

# %%
# Tails are computed in log space, so far tails stay finite.
print("log P(N(0, 1000) >= 3000) =", null_tail(GAUSSIAN, 1000, 3.0, log=True))
print("log P(Poisson(1000) >= 5000) =", null_tail(POISSON, 1000, 5.0, log=True))
