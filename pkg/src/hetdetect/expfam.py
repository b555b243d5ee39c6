"""One-parameter exponential families with unit base measures.

Each family is tilted from a fixed base law ``F_0`` by
``dF_theta(x) = exp(theta * x - psi(theta)) dF_0(x)``. Three bases are
supported: N(0, 1), Poisson(1) and Bernoulli(1/2). Closed forms are used for
the log-MGF ``psi``, the mean map ``mu = psi'`` and the Legendre-Fenchel rate
function ``I``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

LOG2 = math.log(2.0)


class FamilyKind(str, enum.Enum):
    GAUSSIAN = "gaussian"
    POISSON = "poisson"
    BERNOULLI_HALF = "bernoulli-half"


@dataclass(frozen=True)
class ExpFamilySpec:
    """An exponential family identified by its base law.

    Only ``bernoulli-half`` admits the degenerate alternative ``theta = -inf``
    (the point mass at zero).
    """

    kind: FamilyKind

    def __post_init__(self):
        object.__setattr__(self, "kind", FamilyKind(self.kind))

    @property
    def theta_domain(self) -> tuple[float, float]:
        return (-math.inf, math.inf)

    @property
    def degenerate_alternative_supported(self) -> bool:
        return self.kind is FamilyKind.BERNOULLI_HALF

    @property
    def null_mean(self) -> float:
        return {FamilyKind.GAUSSIAN: 0.0, FamilyKind.POISSON: 1.0,
                FamilyKind.BERNOULLI_HALF: 0.5}[self.kind]

    @property
    def null_variance(self) -> float:
        return {FamilyKind.GAUSSIAN: 1.0, FamilyKind.POISSON: 1.0,
                FamilyKind.BERNOULLI_HALF: 0.25}[self.kind]

    @property
    def support(self) -> tuple[float, float]:
        """Closed convex hull of the base-law support."""
        return {FamilyKind.GAUSSIAN: (-math.inf, math.inf),
                FamilyKind.POISSON: (0.0, math.inf),
                FamilyKind.BERNOULLI_HALF: (0.0, 1.0)}[self.kind]

    @property
    def discrete(self) -> bool:
        return self.kind is not FamilyKind.GAUSSIAN

    def __str__(self):
        return self.kind.value


GAUSSIAN = ExpFamilySpec(FamilyKind.GAUSSIAN)
POISSON = ExpFamilySpec(FamilyKind.POISSON)
BERNOULLI_HALF = ExpFamilySpec(FamilyKind.BERNOULLI_HALF)


def get_family(name: str | FamilyKind | ExpFamilySpec) -> ExpFamilySpec:
    """Look a family up by its string id (``gaussian``, ``poisson``, ``bernoulli-half``)."""
    if isinstance(name, ExpFamilySpec):
        return name
    try:
        return ExpFamilySpec(FamilyKind(name))
    except ValueError:
        raise ValueError(
            f"unknown family {name!r}; expected one of "
            f"{[k.value for k in FamilyKind]}") from None


def is_degenerate_theta(spec: ExpFamilySpec, theta) -> bool:
    return (spec.degenerate_alternative_supported and np.ndim(theta) == 0
            and theta == -math.inf)


def _check_theta(spec: ExpFamilySpec, theta):
    theta = np.asarray(theta, dtype=float)
    bad = np.isnan(theta) | np.isposinf(theta)
    if not spec.degenerate_alternative_supported:
        bad |= np.isneginf(theta)
    if np.any(bad):
        offending = theta[bad] if theta.ndim else theta
        raise ValueError(f"theta outside the domain of {spec}: {offending}")
    return theta


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def psi(spec: ExpFamilySpec, theta):
    """Log moment generating function of the base law."""
    theta = _check_theta(spec, theta)
    if spec.kind is FamilyKind.GAUSSIAN:
        out = 0.5 * theta ** 2
    elif spec.kind is FamilyKind.POISSON:
        out = np.expm1(theta)
    else:
        out = np.logaddexp(0.0, theta) - LOG2
    return _out(out)


def mu_of_theta(spec: ExpFamilySpec, theta):
    """Mean of ``F_theta``, i.e. ``psi'(theta)``."""
    theta = _check_theta(spec, theta)
    if spec.kind is FamilyKind.GAUSSIAN:
        out = theta + 0.0
    elif spec.kind is FamilyKind.POISSON:
        out = np.exp(theta)
    else:
        out = special.expit(theta)
    return _out(out)


def theta_of_mu(spec: ExpFamilySpec, nu):
    """Inverse mean map. Boundary means map to ``+-inf``; outside the support is an error."""
    nu = np.asarray(nu, dtype=float)
    lo, hi = spec.support
    if np.any(np.isnan(nu) | (nu < lo) | (nu > hi)):
        raise ValueError(f"mean outside the support {spec.support} of {spec}: {nu}")
    with np.errstate(divide="ignore"):
        if spec.kind is FamilyKind.GAUSSIAN:
            out = nu + 0.0
        elif spec.kind is FamilyKind.POISSON:
            out = np.log(nu)
        else:
            out = special.logit(nu)
    return _out(out)


def rate_I(spec: ExpFamilySpec, nu):
    """Rate function ``I(nu) = sup_theta [theta*nu - psi(theta)]``; ``+inf`` off the support hull."""
    nu = np.asarray(nu, dtype=float)
    if spec.kind is FamilyKind.GAUSSIAN:
        out = 0.5 * nu ** 2
    elif spec.kind is FamilyKind.POISSON:
        inside = nu >= 0
        v = np.where(inside, nu, 0.0)
        out = np.where(inside, special.xlogy(v, v) - v + 1.0, np.inf)
    else:
        inside = (nu >= 0) & (nu <= 1)
        v = np.where(inside, nu, 0.5)
        out = np.where(inside,
                       special.xlogy(v, 2 * v) + special.xlogy(1 - v, 2 * (1 - v)),
                       np.inf)
    return _out(out)


def rate_I_prime(spec: ExpFamilySpec, nu):
    """Derivative of the rate function, equal to ``theta_of_mu``."""
    return theta_of_mu(spec, nu)


def rate_at_theta(spec: ExpFamilySpec, theta):
    """``I(mu(theta)) = theta*mu(theta) - psi(theta)``, with the ``-inf`` limit handled."""
    theta = _check_theta(spec, theta)
    if spec.kind is FamilyKind.BERNOULLI_HALF:
        # theta * expit(theta) -> 0 as theta -> -inf
        m = special.expit(theta)
        with np.errstate(invalid="ignore"):
            t = np.where(np.isneginf(theta), 0.0, theta * m)
        return _out(t - (np.logaddexp(0.0, theta) - LOG2))
    return _out(theta * np.asarray(mu_of_theta(spec, theta)) - np.asarray(psi(spec, theta)))


@dataclass(frozen=True)
class TiltEndpoints:
    """Level-set endpoints of the rate function at height ``1/a``.

    ``mu_plus = sup{mu: I(mu) <= 1/a}`` and ``mu_minus = inf{...}``, with the
    matching natural parameters (``+-inf`` when the endpoint sits on the
    support boundary).
    """

    a: float
    mu_plus: float
    mu_minus: float
    theta_plus: float
    theta_minus: float


def _solve_level(spec: ExpFamilySpec, level: float, sign: int) -> tuple[float, float]:
    """Solve ``I(mu(theta)) = level`` for theta of the given sign."""
    lo, hi = spec.support
    edge = hi if sign > 0 else lo
    edge_rate = rate_I(spec, edge) if math.isfinite(edge) else math.inf
    if edge_rate <= level:
        return edge, sign * math.inf

    def h(t):
        return rate_at_theta(spec, sign * t) - level

    b = 1.0
    while h(b) < 0:
        b *= 2.0
        if b > 1e6:
            raise RuntimeError(f"no bracket for I(mu)={level} in {spec}")
    t = optimize.brentq(h, 0.0, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    theta = sign * t
    return mu_of_theta(spec, theta), theta


def tilt_endpoints(spec: ExpFamilySpec, a: float) -> TiltEndpoints:
    """Endpoints ``mu_a^+-`` of ``{mu: I(mu) <= 1/a}`` and their tilts ``theta_a^+-``."""
    if not a > 0:
        raise ValueError(f"a must be positive, got {a}")
    level = 1.0 / a
    if spec.kind is FamilyKind.GAUSSIAN:
        r = math.sqrt(2.0 * level)
        return TiltEndpoints(a, r, -r, r, -r)
    mu_p, th_p = _solve_level(spec, level, +1)
    mu_m, th_m = _solve_level(spec, level, -1)
    return TiltEndpoints(a, mu_p, mu_m, th_p, th_m)
