"""Exact two-sided p-values for sums of ``k`` i.i.d. draws from the base law.

For discrete families the p-values are randomized so they are exactly
Uniform(0, 1) under the null:

    p_up  = P0(Y > y) + u * P0(Y = y)
    p_low = P0(Y < y) + (1 - u) * P0(Y = y)
    p     = min(1, 2 * min(p_up, p_low))

``p_up + p_low = 1``; both sides are evaluated directly to avoid cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as sps
from scipy import special

from .expfam import ExpFamilySpec, FamilyKind, is_degenerate_theta, mu_of_theta

_TINY = np.finfo(float).tiny
# below this, scipy's logsf/logcdf lose precision or underflow to -inf
_LOG_FLOOR = -600.0


@dataclass(frozen=True)
class PValueSet:
    p: np.ndarray
    K: np.ndarray

    def __post_init__(self):
        if self.p.shape != self.K.shape or self.p.ndim != 1:
            raise ValueError("p and K must be aligned 1-d arrays")

    @property
    def n(self) -> int:
        return self.p.size


def _null_law(spec: ExpFamilySpec, k):
    if spec.kind is FamilyKind.POISSON:
        return sps.poisson(k)
    if spec.kind is FamilyKind.BERNOULLI_HALF:
        return sps.binom(k, 0.5)
    raise AssertionError(spec)


def _validate(spec, k, y):
    k = np.asarray(k)
    y = np.asarray(y, dtype=float)
    if np.any(k < 1) or np.any(k != np.floor(k)):
        raise ValueError("sample sizes must be positive integers")
    if spec.discrete:
        bad = (y != np.floor(y)) | (y < 0)
        if spec.kind is FamilyKind.BERNOULLI_HALF:
            bad |= y > k
        if np.any(bad):
            raise ValueError(f"response outside the support of the {spec} convolution: "
                             f"{y[bad] if y.ndim else y}")
    return k, y


def _two_sided(spec, k, y, u, randomize=True):
    if spec.kind is FamilyKind.GAUSSIAN:
        z = np.abs(y) / np.sqrt(k)
        p = 2.0 * special.ndtr(-z)
    else:
        law = _null_law(spec, k)
        pmf = law.pmf(y)
        if randomize:
            p_up = law.sf(y) + u * pmf
            p_low = law.cdf(y - 1) + (1.0 - u) * pmf
        else:
            p_up = law.sf(y - 1)
            p_low = law.cdf(y)
        p = 2.0 * np.minimum(p_up, p_low)
    return np.clip(p, _TINY, 1.0)


def two_sided_pvalue(spec: ExpFamilySpec, k: int, y: float, u: float = 0.0,
                     randomize: bool = True) -> float:
    """Two-sided p-value of ``y`` against the ``k``-fold null convolution.

    ``u`` in ``[0, 1)`` is the randomization variate; ignored for the Gaussian
    family. With ``randomize=False`` each side uses the closed tail
    ``P0(Y >= y)`` / ``P0(Y <= y)``.
    """
    if not 0.0 <= u < 1.0:
        raise ValueError(f"u must lie in [0, 1), got {u}")
    k, y = _validate(spec, k, y)
    return float(_two_sided(spec, k, y, u, randomize))


def pvalues_for_dataset(spec: ExpFamilySpec, Y, K, seed=None,
                        randomize: bool = True) -> PValueSet:
    """Vectorized p-values; ``u_i`` is the ``i``-th draw of a generator seeded by ``seed``."""
    Y = np.asarray(Y, dtype=float)
    K = np.asarray(K, dtype=np.int64)
    if Y.shape != K.shape:
        raise ValueError("Y and K must be aligned")
    K, Y = _validate(spec, K, Y)
    if spec.discrete and randomize:
        u = np.random.default_rng(seed).random(Y.size)
    else:
        u = np.zeros(Y.size)
    return PValueSet(_two_sided(spec, K, Y, u, randomize), K)


def _log_tail(spec, theta, k, x, side, strict):
    """log P_theta(Y >= x) (upper) or log P_theta(Y <= x) (lower) for the k-fold law."""
    if is_degenerate_theta(spec, theta):
        if side == "upper":
            hit = x < 0 if strict else x <= 0
        else:
            hit = x > 0 if strict else x >= 0
        return 0.0 if hit else -math.inf
    if spec.kind is FamilyKind.GAUSSIAN:
        z = (x - k * theta) / math.sqrt(k)
        return float(special.log_ndtr(-z if side == "upper" else z))
    m = mu_of_theta(spec, theta)
    if spec.kind is FamilyKind.POISSON:
        law = sps.poisson(k * m)
    else:
        law = sps.binom(k, m)
    # snap k*nu onto the lattice when it is an integer up to rounding
    r = round(x)
    if abs(x - r) < 1e-9 * max(1.0, abs(x)):
        x = float(r)
    if side == "upper":
        j = math.floor(x) if strict else math.ceil(x) - 1
        lt = float(law.logsf(j))
        return lt if lt > _LOG_FLOOR else _log_lattice_sum(law, j + 1, +1)
    j = math.ceil(x) - 1 if strict else math.floor(x)
    lt = float(law.logcdf(j))
    return lt if lt > _LOG_FLOOR else _log_lattice_sum(law, j, -1)


def _log_lattice_sum(law, start, step, chunk=256, drop=60.0):
    """log of sum_{i >= 0} pmf(start + step * i), stopping once terms fall ``drop`` nats.

    Used only far in a tail, where the terms decay monotonically away from ``start``.
    """
    lo, hi = law.support()
    if step < 0 and start < lo or step > 0 and start > hi:
        return -math.inf
    total, first = -math.inf, None
    j = start
    while True:
        idx = j + step * np.arange(chunk)
        idx = idx[(idx >= lo) & (idx <= hi)]
        if idx.size == 0:
            return total
        lp = law.logpmf(idx)
        if first is None:
            first = lp[0]
        total = float(np.logaddexp(total, special.logsumexp(lp)))
        if lp[-1] < first - drop or lp[-1] == -math.inf:
            return total
        j = j + step * chunk


def tilted_tail(spec: ExpFamilySpec, theta: float, k: int, nu: float,
                side: str = "upper", strict: bool = False, log: bool = False) -> float:
    """Exact tail of ``Y ~ F_theta^k`` beyond ``k * nu``.

    ``side='upper'`` gives ``P(Y >= k nu)`` (``>`` when ``strict``);
    ``side='lower'`` gives ``P(Y <= k nu)`` (``<`` when ``strict``).
    The computation runs in log space; pass ``log=True`` to keep it there.
    """
    if side not in ("upper", "lower"):
        raise ValueError(f"side must be 'upper' or 'lower', got {side!r}")
    if k < 1:
        raise ValueError("k must be a positive integer")
    lt = _log_tail(spec, theta, k, k * nu, side, strict)
    return lt if log else math.exp(lt)


def null_tail(spec: ExpFamilySpec, k: int, nu: float, side: str = "upper",
              strict: bool = False, log: bool = False) -> float:
    """:func:`tilted_tail` under the null ``theta = 0``."""
    return tilted_tail(spec, 0.0, k, nu, side, strict, log)
