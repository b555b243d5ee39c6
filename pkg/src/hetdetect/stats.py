"""Test statistics for sparse heterogeneous mixtures.

``hc``, ``hc_threshold`` and ``chi_squared`` are large when significant;
``bonferroni`` and ``rank_adjust`` are small when significant.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .expfam import GAUSSIAN, ExpFamilySpec
from .pvalues import PValueSet


class StatisticId(str, enum.Enum):
    HC = "hc"
    HC_THRES = "hcthres"
    BONFERRONI = "bonferroni"
    RANK_ADJUST = "rankadjust"
    CHI_SQ = "chisq"


class Direction(str, enum.Enum):
    LARGE = "large"
    SMALL = "small"


DIRECTION = {
    StatisticId.HC: Direction.LARGE,
    StatisticId.HC_THRES: Direction.LARGE,
    StatisticId.CHI_SQ: Direction.LARGE,
    StatisticId.BONFERRONI: Direction.SMALL,
    StatisticId.RANK_ADJUST: Direction.SMALL,
}

ALL_STATISTICS = tuple(StatisticId)


class UndefinedStatistic(ValueError):
    pass


@dataclass(frozen=True)
class StatResult:
    statistic_id: StatisticId
    value: float
    maximizer_info: dict | None = None

    @property
    def direction(self) -> Direction:
        return DIRECTION[self.statistic_id]


@dataclass(frozen=True)
class RankVector:
    """Sample-size ranks ``r_i = #{j: K_j >= K_i}`` and subset sizes ``n_k``."""

    r: np.ndarray
    n_k: dict = field(default_factory=dict)


def _hc_sorted(ps: np.ndarray):
    n = ps.size
    m = n // 2
    p = ps[:m]
    i = np.arange(1, m + 1)
    ok = p < 1.0
    if not ok.any():
        return -math.inf, None
    z = (i[ok] - n * p[ok]) / np.sqrt(n * p[ok] * (1.0 - p[ok]))
    j = int(np.argmax(z))
    return float(z[j]), int(i[ok][j])


def hc(p) -> StatResult:
    """Higher criticism, ``max_{i <= n/2} (i - n p_(i)) / sqrt(n p_(i) (1 - p_(i)))``.

    Terms with ``p_(i) = 1`` are skipped; if every term is skipped the value is ``-inf``.
    """
    p = np.asarray(p, dtype=float)
    if p.size < 2:
        raise UndefinedStatistic("HC needs at least two p-values")
    value, i = _hc_sorted(np.sort(p))
    return StatResult(StatisticId.HC, value, {"i": i})


def hc_threshold(pv: PValueSet, thresholds) -> StatResult:
    """Maximum of HC over the subsets ``{i: K_i >= k}`` for ``k`` in ``thresholds``.

    Subsets with fewer than two members are skipped.
    """
    thresholds = np.unique(np.asarray(thresholds, dtype=np.int64))
    if thresholds.size == 0:
        raise ValueError("thresholds must be nonempty")
    if np.any(thresholds < 1):
        raise ValueError("thresholds must be >= 1")
    order = np.argsort(pv.p, kind="stable")
    ps, ks = pv.p[order], pv.K[order]
    best, best_k, best_i = -math.inf, None, None
    for k in thresholds:
        sub = ps[ks >= k]
        if sub.size < 2:
            continue
        value, i = _hc_sorted(sub)
        if best_k is None or value > best:
            best, best_k, best_i = value, int(k), i
    if best_k is None:
        raise UndefinedStatistic("every threshold leaves fewer than two p-values")
    return StatResult(StatisticId.HC_THRES, best, {"k": best_k, "i": best_i})


def bonferroni(p) -> StatResult:
    """``n * min(p)``; approximately Exp(1) under the global null."""
    p = np.asarray(p, dtype=float)
    if p.size == 0:
        raise UndefinedStatistic("no p-values")
    return StatResult(StatisticId.BONFERRONI, float(p.size * p.min()))


def ranks(K) -> RankVector:
    """Weak ranks of the sample sizes, largest first; ties share a rank."""
    K = np.asarray(K, dtype=np.int64)
    if K.size == 0:
        raise ValueError("K must be nonempty")
    sk = np.sort(K)
    r = K.size - np.searchsorted(sk, K, side="left")
    levels = np.unique(np.concatenate([[1], sk]))
    n_k = dict(zip(levels.tolist(),
                   (K.size - np.searchsorted(sk, levels, side="left")).tolist()))
    return RankVector(r.astype(np.int64), n_k)


def rank_adjust(pv: PValueSet, thresholds=None, check: bool = False) -> StatResult:
    """Rank-adjusted Bonferroni, ``min_i r_i p_i = min_k n_k p_(1)k``.

    With ``thresholds`` the minimum runs over those ``k`` only. ``check``
    recomputes the unrestricted statistic both ways and asserts equality.
    """
    if pv.n == 0:
        raise UndefinedStatistic("no p-values")
    if thresholds is not None:
        best, best_k = math.inf, None
        for k in np.unique(np.asarray(thresholds, dtype=np.int64)):
            sub = pv.p[pv.K >= k]
            if sub.size == 0:
                continue
            v = float(sub.size * sub.min())
            if v < best:
                best, best_k = v, int(k)
        if best_k is None:
            raise UndefinedStatistic("every threshold leaves an empty subset")
        return StatResult(StatisticId.RANK_ADJUST, best, {"k": best_k})
    rv = ranks(pv.K)
    prod = rv.r * pv.p
    i = int(np.argmin(prod))
    value = float(prod[i])
    if check:
        alt = min(n * pv.p[pv.K >= k].min() for k, n in rv.n_k.items())
        if alt != value:
            raise AssertionError(f"rank forms disagree: {value} != {alt}")
    return StatResult(StatisticId.RANK_ADJUST, value, {"i": i, "k": int(pv.K[i])})


def chi_squared(Y, K, spec: ExpFamilySpec = GAUSSIAN) -> StatResult:
    """``sum (Y_i - K_i m0)^2 / (K_i v0)`` with null mean ``m0`` and variance ``v0``.

    For the Gaussian family this is ``sum Y_i^2 / K_i``.
    """
    Y = np.asarray(Y, dtype=float)
    K = np.asarray(K, dtype=float)
    if Y.shape != K.shape:
        raise ValueError("Y and K must be aligned")
    if np.any(K < 1):
        raise ValueError("sample sizes must be >= 1")
    resid = Y - K * spec.null_mean
    return StatResult(StatisticId.CHI_SQ,
                      float(np.sum(resid ** 2 / (K * spec.null_variance))))


def compute_all(Y, pv: PValueSet, spec: ExpFamilySpec = GAUSSIAN,
                thresholds=None, statistics=ALL_STATISTICS) -> dict:
    """Evaluate the requested statistics on one dataset.

    ``thresholds=None`` uses every distinct sample size, which makes the
    thresholded statistics exact.
    """
    statistics = [StatisticId(s) for s in statistics]
    if thresholds is None:
        thresholds = np.unique(pv.K)
    out = {}
    for s in statistics:
        if s is StatisticId.HC:
            out[s] = hc(pv.p)
        elif s is StatisticId.HC_THRES:
            out[s] = hc_threshold(pv, thresholds)
        elif s is StatisticId.BONFERRONI:
            out[s] = bonferroni(pv.p)
        elif s is StatisticId.RANK_ADJUST:
            out[s] = rank_adjust(pv, thresholds)
        else:
            out[s] = chi_squared(Y, pv.K, spec)
    return out
