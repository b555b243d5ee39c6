"""Sample-size laws for the per-hypothesis counts ``K_i``.

A law is described on the log scale: ``K = a log n`` has probability roughly
``n^{-J(a)}``, where ``J`` vanishes on ``[0, a0]`` and ``lambda_n = a0 log n``
is the typical size.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize


class SampleSizeKind(str, enum.Enum):
    POISSON_MAX1 = "poisson-max1"
    ROUNDED_NORMAL = "rounded-normal"
    NEGATIVE_BINOMIAL = "negbin"
    DETERMINISTIC = "deterministic"


class UnsupportedRateFunction(ValueError):
    """The sample-size law has no closed-form rate function."""


@dataclass(frozen=True)
class SampleSizeSpec:
    """Law of ``K_in`` for a study with ``n`` hypotheses.

    ``tau`` is used only by ``rounded-normal`` (variance ``tau * lambda_n``).
    ``nb_r`` is the negative-binomial shape; ``None`` picks ``1/(1-p)`` so the
    unclamped mean equals ``lambda_n``.
    """

    kind: SampleSizeKind
    a0: float
    n: float
    tau: float = 1.0
    nb_r: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", SampleSizeKind(self.kind))
        if not self.a0 > 0:
            raise ValueError(f"a0 must be positive, got {self.a0}")
        if not self.n > 1:
            raise ValueError(f"n must exceed 1, got {self.n}")
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")

    @property
    def lam(self) -> float:
        """Typical sample size ``lambda_n = a0 log n``."""
        return self.a0 * math.log(self.n)

    @property
    def nb_p(self) -> float:
        return 1.0 / self.lam

    @property
    def has_rate(self) -> bool:
        return self.kind is not SampleSizeKind.NEGATIVE_BINOMIAL


def get_samplesize(name: str, a0: float, n: float, tau: float = 1.0,
                   nb_r: float | None = None) -> SampleSizeSpec:
    try:
        kind = SampleSizeKind(name)
    except ValueError:
        raise ValueError(
            f"unknown sample-size law {name!r}; expected one of "
            f"{[k.value for k in SampleSizeKind]}") from None
    return SampleSizeSpec(kind, a0, n, tau, nb_r)


def _require_rate(spec: SampleSizeSpec):
    if not spec.has_rate:
        raise UnsupportedRateFunction(
            f"{spec.kind.value} is simulation-only and has no rate function J")


def rate_J(spec: SampleSizeSpec, a):
    """Rate function of ``K / log n``; zero on ``[0, a0]``."""
    _require_rate(spec)
    a = np.asarray(a, dtype=float)
    if np.any(a < 0):
        raise ValueError("a must be nonnegative")
    a0 = spec.a0
    above = a > a0
    x = np.where(above, a, a0)
    if spec.kind is SampleSizeKind.POISSON_MAX1:
        val = x * np.log(x / a0) - x + a0
    elif spec.kind is SampleSizeKind.ROUNDED_NORMAL:
        val = (x - a0) ** 2 / (2.0 * a0 * spec.tau)
    else:
        val = np.full_like(x, np.inf)
    out = np.where(above, val, 0.0)
    return float(out) if out.ndim == 0 else out


def rate_J_prime(spec: SampleSizeSpec, a):
    """Derivative ``J'(a)``; zero up to ``a0``. For a deterministic law it is ``+inf`` above ``a0``."""
    _require_rate(spec)
    a = np.asarray(a, dtype=float)
    a0 = spec.a0
    above = a > a0
    x = np.where(above, a, a0)
    if spec.kind is SampleSizeKind.POISSON_MAX1:
        val = np.log(x / a0)
    elif spec.kind is SampleSizeKind.ROUNDED_NORMAL:
        val = (x - a0) / (a0 * spec.tau)
    else:
        val = np.full_like(x, np.inf)
    out = np.where(above, val, 0.0)
    return float(out) if out.ndim == 0 else out


def inverse_J_prime(spec: SampleSizeSpec, s):
    """Smallest ``a >= a0`` with ``J'(a) = s`` (the subgradient point ``a0`` for a deterministic law)."""
    _require_rate(spec)
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("s must be nonnegative")
    if spec.kind is SampleSizeKind.POISSON_MAX1:
        out = spec.a0 * np.exp(s)
    elif spec.kind is SampleSizeKind.ROUNDED_NORMAL:
        out = spec.a0 * (1.0 + spec.tau * s)
    else:
        out = np.full_like(s, spec.a0)
    return float(out) if out.ndim == 0 else out


def a_one(spec: SampleSizeSpec) -> float:
    """The level ``a1 > a0`` with ``J(a1) = 1``; larger counts are negligible."""
    _require_rate(spec)
    a0 = spec.a0
    if spec.kind is SampleSizeKind.ROUNDED_NORMAL:
        return a0 + math.sqrt(2.0 * a0 * spec.tau)
    if spec.kind is SampleSizeKind.DETERMINISTIC:
        return a0
    hi = 2.0 * a0
    while rate_J(spec, hi) < 1.0:
        hi *= 2.0
    return optimize.brentq(lambda a: rate_J(spec, a) - 1.0, a0, hi, xtol=1e-14)


def sample_K(spec: SampleSizeSpec, count: int, seed) -> np.ndarray:
    """Draw ``count`` i.i.d. sample sizes (all ``>= 1``), deterministic given ``seed``."""
    if count < 1:
        raise ValueError("count must be positive")
    rng = np.random.default_rng(seed)
    lam = spec.lam
    if spec.kind is SampleSizeKind.POISSON_MAX1:
        k = rng.poisson(lam, size=count)
    elif spec.kind is SampleSizeKind.ROUNDED_NORMAL:
        k = np.rint(rng.normal(lam, math.sqrt(spec.tau * lam), size=count))
    elif spec.kind is SampleSizeKind.NEGATIVE_BINOMIAL:
        p = spec.nb_p
        r = spec.nb_r if spec.nb_r is not None else 1.0 / (1.0 - p)
        k = rng.negative_binomial(r, p, size=count)
    else:
        # guard against log(e**10) landing a hair above 10
        k = np.full(count, math.ceil(lam - 1e-9))
    return np.maximum(k, 1).astype(np.int64)
