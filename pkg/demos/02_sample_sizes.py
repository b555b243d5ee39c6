"""
Heterogeneous sample sizes
==========================

The sample sizes ``K_i`` scale like ``lambda_n = a0 log n``. Their large
deviations are summarized by a rate function ``J``, with
``P(K = a log n) ~ n^{-J(a)}``.
"""

import math

import numpy as np

from hetdetect import samplesize as ssz

n = 100_000
pm = ssz.get_samplesize("poisson-max1", 0.5, n)
rn = ssz.get_samplesize("rounded-normal", 0.5, n, tau=1.0)
nb = ssz.get_samplesize("negbin", 0.5, n)

# %%
# ``J`` vanishes up to ``a0`` and grows beyond it. ``a1`` marks ``J(a1) = 1``,
# the level past which sample sizes are rarer than ``1/n``.
a = np.array([0.25, 0.5, 1.0, 1.5, 2.0])
print("J poisson        ", np.round(ssz.rate_J(pm, a), 4), " a1 =", round(ssz.a_one(pm), 4))
print("J rounded-normal ", np.round(ssz.rate_J(rn, a), 4), " a1 =", round(ssz.a_one(rn), 4))

# %%
# Empirical check of the local rate for the Poisson law at ``k = 2 lambda_n``.
# At this n the Stirling factor ``sqrt(2 pi k)`` still adds about 0.2 to the
# exponent. It vanishes relative to ``log n`` only asymptotically.
K = ssz.sample_K(pm, 1_000_000, seed=1)
k = round(2 * pm.lam)
freq = np.mean(K == k)
stirling = 0.5 * math.log(2 * math.pi * k) / math.log(n)
print(f"-log P(K={k}) / log n = {-math.log(freq) / math.log(n):.3f}, "
      f"J(k / log n) = {ssz.rate_J(pm, k / math.log(n)):.3f}, "
      f"plus Stirling term = {ssz.rate_J(pm, k / math.log(n)) + stirling:.3f}")

# %%
# The negative-binomial law is overdispersed, with variance/mean near ``1/p``.
K = ssz.sample_K(nb, n, seed=2)
print(f"negative binomial: mean {K.mean():.2f}, variance/mean {K.var() / K.mean():.2f}, "
      f"1/p = {1 / nb.nb_p:.2f}")
