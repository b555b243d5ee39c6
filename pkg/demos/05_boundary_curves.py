"""
Detection boundaries
====================

For each ``theta`` the boundary ``b(theta)`` is the largest sparsity
exponent ``beta`` at which a test can still detect the mixture. ``b_J`` is
the optimal boundary (thresholded HC). ``b_H`` belongs to plain HC, ``b_B``
to Bonferroni and ``b_R`` to the rank adjustment.
"""

import math

import numpy as np

from hetdetect.expfam import BERNOULLI_HALF, GAUSSIAN
from hetdetect.phase import b_H_curve, b_homogeneous, curve, grid_oracle
from hetdetect.samplesize import get_samplesize

ss = get_samplesize("poisson-max1", 0.5, 1e5)

# %%
# A small table of the four curves. ``regime`` says whether the optimum is
# interior or sits on the constraint.
print(f"{'theta':>6} " + " ".join(f"{c:>9}" for c in ("BJ", "BH", "BB", "BR")))
for theta in np.linspace(0.2, 1.6, 8):
    pts = [curve(c, GAUSSIAN, ss, theta) for c in ("BJ", "BH", "BB", "BR")]
    print(f"{theta:6.2f} " + " ".join(f"{p.value:9.5f}" for p in pts),
          pts[0].regime.value)

# %%
# The closed-form solvers agree with a brute-force grid maximization.
p = curve("BR", GAUSSIAN, ss, 0.9)
print("b_R(0.9):", p.value, "oracle:", grid_oracle("BR", GAUSSIAN, ss, 0.9).value)

# %%
# With a common sample size the problem is homogeneous and the Gaussian
# boundary has a two-branch closed form.
print("homogeneous a=1, theta=1:", b_homogeneous(GAUSSIAN, 1.0, 1.0).value,
      "=", 1 - (1 - math.sqrt(0.5)) ** 2)

# %%
# Bernoulli(1/2) against a point mass at zero. HC's boundary grows linearly
# in a0 until the optimum reaches the edge ``a = 1/log 2``.
for a0 in (0.3, 0.5, 1.0, 1.2):
    v = b_H_curve(BERNOULLI_HALF, get_samplesize("poisson-max1", a0, 1e5), -math.inf).value
    print(f"a0={a0}: b_H = {v:.6f}")
