"""
Test statistics on one dataset
==============================

A sparse Gaussian mixture with unequal sample sizes, scored by higher
criticism (HC), thresholded HC, Bonferroni, the rank-adjusted Bonferroni
and chi-squared.
"""

import numpy as np

from hetdetect import mc
from hetdetect.expfam import GAUSSIAN
from hetdetect.pvalues import pvalues_for_dataset
from hetdetect.stats import compute_all, ranks

cfg = mc.desk_profile(theta=0.8, beta=0.55, seed=3)
K = mc.draw_K(cfg)
data = mc.simulate_dataset(cfg, K, cfg.epsilon, rng=4)
print(f"n = {cfg.n}, {data.labels.sum()} non-null, K ranges {K.min()}..{K.max()}")

# %%
# P-values, then every statistic. Thresholds default to every distinct
# sample size, so the thresholded statistics are exact.
pv = pvalues_for_dataset(GAUSSIAN, data.Y, K, seed=5)
for sid, res in compute_all(data.Y, pv, GAUSSIAN).items():
    print(f"{sid.value:11s} {res.value:12.4f}  ({res.direction.value} is significant) "
          f"{res.maximizer_info or ''}")

# %%
# Rank weights ``r_i = #{j: K_j >= K_i}`` favour the large samples. Their
# reciprocals sum to at most ``1 + log n``, which controls the family-wise error.
r = ranks(K).r
print("sum 1/r =", np.sum(1 / r), "<= 1 + log n =", 1 + np.log(cfg.n))
