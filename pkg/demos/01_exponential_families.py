"""
Exponential families and their rate functions
=============================================

Each observation is a sum of ``k`` draws from a base law ``F_0``, tilted by
``theta``. Three base laws are available: standard normal, Poisson(1) and
Bernoulli(1/2).
"""

import math

import numpy as np

from hetdetect import expfam as ef

# %%
# The cumulant generating function ``psi`` and the mean map ``mu = psi'``.
theta = np.linspace(-2, 2, 5)
for spec in (ef.GAUSSIAN, ef.POISSON, ef.BERNOULLI_HALF):
    print(f"{spec.kind.value:15s} psi  {np.round(ef.psi(spec, theta), 4)}")
    print(f"{'':15s} mu   {np.round(ef.mu_of_theta(spec, theta), 4)}")

# %%
# The rate function ``I`` is the Legendre transform of ``psi``. At the mean of
# a tilted law it equals ``theta mu - psi``.
nu = ef.mu_of_theta(ef.POISSON, 0.8)
print("I(mu(0.8)) for Poisson:", ef.rate_I(ef.POISSON, nu),
      "=", 0.8 * nu - ef.psi(ef.POISSON, 0.8))

# %%
# Tilt endpoints solve ``I(mu) = 1/a``. For Poisson with ``a <= 1`` there is no
# negative root and the lower endpoint sits on the support edge.
for a in (0.5, 1.0, 2.0):
    te = ef.tilt_endpoints(ef.POISSON, a)
    print(f"a={a}: mu- = {te.mu_minus:.4f} (theta- = {te.theta_minus:.4f}), "
          f"mu+ = {te.mu_plus:.4f}")

# %%
# Bernoulli(1/2) also admits the limiting alternative ``theta = -inf``, a point
# mass at zero with ``psi = -log 2``.
print("psi(-inf) =", ef.psi(ef.BERNOULLI_HALF, -math.inf))
