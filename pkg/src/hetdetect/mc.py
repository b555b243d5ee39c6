"""Monte Carlo calibration and power estimation for sparse mixtures.

One experiment fixes the sample sizes ``K`` once and reuses them for every
null and alternative run. Each run draws from its own generator, seeded by
``SeedSequence(seed, spawn_key=(stream, run))``. Results therefore do not
depend on execution order, and parallel runs reproduce sequential ones
bit for bit. Alternative runs share seeds across ``(beta, theta)`` cells
(common random numbers).
"""

from __future__ import annotations

import csv
import logging
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy import special

from .expfam import ExpFamilySpec, FamilyKind, get_family, is_degenerate_theta
from .pvalues import pvalues_for_dataset
from .samplesize import SampleSizeSpec, get_samplesize, sample_K
from .stats import ALL_STATISTICS, DIRECTION, Direction, StatisticId, compute_all

log = logging.getLogger(__name__)

STREAM_K, STREAM_NULL, STREAM_ALT, STREAM_CHECK = 0, 1, 2, 3

FULL_M_LIST = (3000, 10000, 30000, 100000)


@dataclass(frozen=True)
class SimConfig:
    """Everything needed to reproduce one experiment.

    ``samplesize.n`` must equal ``n``. ``threshold_m_list`` picks the
    thresholds for HC^thres and the rank adjustment: for each ``m`` the largest
    ``k`` with ``#{i: K_i >= k} >= m``.
    """

    n: int
    family: ExpFamilySpec
    samplesize: SampleSizeSpec
    theta: float = 1.0
    beta: float = 0.6
    runs_null: int = 999
    runs_alt: int = 1000
    alpha: float = 0.05
    seed: int = 0
    threshold_m_list: tuple = FULL_M_LIST
    statistics: tuple = ALL_STATISTICS
    randomize: bool = True

    def __post_init__(self):
        object.__setattr__(self, "statistics", tuple(StatisticId(s) for s in self.statistics))
        object.__setattr__(self, "threshold_m_list", tuple(int(m) for m in self.threshold_m_list))
        if self.samplesize.n != self.n:
            raise ValueError(f"samplesize.n={self.samplesize.n} differs from n={self.n}")
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.runs_null < math.ceil(1.0 / self.alpha) - 1:
            raise ValueError(f"runs_null={self.runs_null} too small for alpha={self.alpha}")
        if self.theta != self.theta or (math.isinf(self.theta)
                                        and not is_degenerate_theta(self.family, self.theta)):
            raise ValueError(f"invalid theta {self.theta} for {self.family}")

    @property
    def epsilon(self) -> float:
        return self.n ** (-self.beta)

    def manifest(self) -> dict:
        """Flat ``key -> str`` view, the format read back by :func:`config_from_manifest`."""
        ss = self.samplesize
        return {
            "n": str(self.n),
            "family": self.family.kind.value,
            "samplesize": ss.kind.value,
            "a0": repr(ss.a0),
            "tau": repr(ss.tau),
            "nb_r": "" if ss.nb_r is None else repr(ss.nb_r),
            "theta": repr(self.theta),
            "beta": repr(self.beta),
            "runs_null": str(self.runs_null),
            "runs_alt": str(self.runs_alt),
            "alpha": repr(self.alpha),
            "seed": str(self.seed),
            "thresholds_m": ",".join(map(str, self.threshold_m_list)),
            "stats": ",".join(s.value for s in self.statistics),
            "randomize": str(self.randomize).lower(),
        }


def config_from_manifest(d: dict) -> SimConfig:
    n = int(float(d["n"]))
    nb_r = d.get("nb_r") or None
    ss = get_samplesize(d["samplesize"], float(d["a0"]), n, float(d.get("tau", 1.0)),
                        None if nb_r is None else float(nb_r))
    stats = d.get("stats")
    return SimConfig(
        n=n, family=get_family(d["family"]), samplesize=ss,
        theta=float(d.get("theta", 1.0)), beta=float(d.get("beta", 0.6)),
        runs_null=int(d.get("runs_null", 999)), runs_alt=int(d.get("runs_alt", 1000)),
        alpha=float(d.get("alpha", 0.05)), seed=int(d.get("seed", 0)),
        threshold_m_list=tuple(int(float(m)) for m in d.get("thresholds_m", "").split(",") if m)
        or FULL_M_LIST,
        statistics=tuple(stats.split(",")) if stats else ALL_STATISTICS,
        randomize=str(d.get("randomize", "true")).lower() in ("1", "true", "yes"),
    )


def desk_profile(family="gaussian", samplesize="poisson-max1", a0=0.5, n=10_000,
                 seed=0, **kw) -> SimConfig:
    """Laptop-sized study: ``n = 1e4``, 200/200 runs, threshold ``m`` scaled with ``n``."""
    fam = get_family(family)
    ss = get_samplesize(samplesize, a0, n, kw.pop("tau", 1.0), kw.pop("nb_r", None))
    m_list = kw.pop("threshold_m_list", tuple(max(2, round(f * n)) for f in (0.03, 0.1, 0.3, 1.0)))
    base = dict(runs_null=200, runs_alt=200)
    base.update(kw)
    return SimConfig(n=n, family=fam, samplesize=ss, seed=seed,
                     threshold_m_list=m_list, **base)


def full_profile(family="gaussian", samplesize="poisson-max1", a0=0.5, seed=0, **kw) -> SimConfig:
    """Full-size study: ``n = 1e5``, 999 null and 1000 alternative runs."""
    n = 100_000
    fam = get_family(family)
    ss = get_samplesize(samplesize, a0, n, kw.pop("tau", 1.0), kw.pop("nb_r", None))
    return SimConfig(n=n, family=fam, samplesize=ss, seed=seed, **kw)


PROFILES = {"desk": desk_profile, "paper-figure2": full_profile, "full": full_profile}


@dataclass
class Dataset:
    Y: np.ndarray
    K: np.ndarray
    labels: np.ndarray


@dataclass(frozen=True)
class PowerRow:
    statistic_id: StatisticId
    beta: float
    theta: float
    critical_value: float
    power: float
    type1_check: float
    seed_used: int


def run_rng(seed: int, stream: int, run: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, run)))


def draw_K(cfg: SimConfig) -> np.ndarray:
    """The experiment's fixed sample sizes."""
    return sample_K(cfg.samplesize, cfg.n, np.random.SeedSequence(cfg.seed, spawn_key=(STREAM_K,)))


def simulate_dataset(cfg: SimConfig, K: np.ndarray, epsilon: float, rng,
                     theta: float | None = None) -> Dataset:
    """One draw of ``Y_i ~ (1 - eps) F_0^{K_i} + eps F_theta^{K_i}``."""
    rng = np.random.default_rng(rng)
    theta = cfg.theta if theta is None else theta
    K = np.asarray(K)
    n = K.size
    labels = rng.random(n) < epsilon
    kind = cfg.family.kind
    if kind is FamilyKind.GAUSSIAN:
        z = rng.standard_normal(n)
        Y = np.sqrt(K) * z + np.where(labels, theta * K, 0.0)
    elif kind is FamilyKind.POISSON:
        Y = rng.poisson(np.where(labels, math.exp(theta) * K, K)).astype(float)
    else:
        q = 0.0 if is_degenerate_theta(cfg.family, theta) else special.expit(theta)
        Y = rng.binomial(K, np.where(labels, q, 0.5)).astype(float)
    return Dataset(Y, K, labels)


def representative_thresholds(K, m_list) -> np.ndarray:
    """For each ``m``, the largest ``k`` with at least ``m`` sample sizes ``>= k``."""
    K = np.asarray(K)
    desc = np.sort(K)[::-1]
    ks = []
    for m in m_list:
        if m > K.size:
            warnings.warn(f"m={m} exceeds n={K.size}; dropped", stacklevel=2)
            continue
        if m < 1:
            raise ValueError(f"m must be positive, got {m}")
        ks.append(int(desc[m - 1]))
    if not ks:
        raise ValueError("no usable m values")
    return np.unique(ks)


def _one_run(cfg, K, thresholds, epsilon, theta, rng):
    data = simulate_dataset(cfg, K, epsilon, rng, theta)
    pv = pvalues_for_dataset(cfg.family, data.Y, K, rng, cfg.randomize)
    res = compute_all(data.Y, pv, cfg.family, thresholds, cfg.statistics)
    return [res[s].value for s in cfg.statistics]


def _batch(args):
    cfg, K, thresholds, epsilon, theta, stream, runs = args
    return np.array([_one_run(cfg, K, thresholds, epsilon, theta, run_rng(cfg.seed, stream, r))
                     for r in runs], dtype=float).reshape(len(runs), len(cfg.statistics))


def simulate_statistics(cfg: SimConfig, K, thresholds, epsilon: float, stream: int,
                        runs: int, theta: float | None = None, n_jobs: int = 1) -> np.ndarray:
    """Statistic values, shape ``(runs, len(cfg.statistics))``, in run order."""
    theta = cfg.theta if theta is None else theta
    idx = list(range(runs))
    if n_jobs == 1 or runs < 2:
        return _batch((cfg, K, thresholds, epsilon, theta, stream, idx))
    chunks = [idx[i::n_jobs] for i in range(n_jobs)]
    out = np.empty((runs, len(cfg.statistics)))
    with ProcessPoolExecutor(max_workers=n_jobs) as pool:
        jobs = [(cfg, K, thresholds, epsilon, theta, stream, c) for c in chunks if c]
        for c, vals in zip([c for c in chunks if c], pool.map(_batch, jobs)):
            out[c] = vals
    return out


def calibration_rank(runs: int, alpha: float) -> int:
    """Order-statistic rank ``ceil(alpha (runs + 1))``; 50 for 999 runs at 0.05."""
    r = math.ceil(alpha * (runs + 1) - 1e-9)
    if runs < math.ceil(1.0 / alpha - 1e-9) - 1 or not 1 <= r <= runs:
        raise ValueError(f"no critical value for runs={runs}, alpha={alpha}")
    return r


def critical_value(null_values, direction: Direction, alpha: float) -> float:
    """``r``-th largest null value (``r``-th smallest for small-is-significant)."""
    v = np.sort(np.asarray(null_values, dtype=float))
    if not np.isfinite(v).any():
        raise RuntimeError("statistic undefined on every null run")
    r = calibration_rank(v.size, alpha)
    return float(v[-r] if direction is Direction.LARGE else v[r - 1])


def rejects(values, c: float, direction: Direction) -> np.ndarray:
    values = np.asarray(values)
    return values >= c if direction is Direction.LARGE else values <= c


class Experiment:
    """A fixed-``K`` experiment: calibration, Type I validation and power."""

    def __init__(self, cfg: SimConfig, n_jobs: int = 1):
        self.cfg = cfg
        self.n_jobs = n_jobs
        self.K = draw_K(cfg)
        self.thresholds = representative_thresholds(
            self.K, [m for m in cfg.threshold_m_list if m <= cfg.n] or [cfg.n])
        self._null = None
        self._crit = None

    def null_values(self) -> np.ndarray:
        if self._null is None:
            self._null = simulate_statistics(self.cfg, self.K, self.thresholds, 0.0,
                                             STREAM_NULL, self.cfg.runs_null, n_jobs=self.n_jobs)
        return self._null

    def calibrate(self) -> dict:
        if self._crit is None:
            null = self.null_values()
            self._crit = {s: critical_value(null[:, j], DIRECTION[s], self.cfg.alpha)
                          for j, s in enumerate(self.cfg.statistics)}
        return dict(self._crit)

    def rejection_rates(self, values: np.ndarray, crit: dict | None = None) -> dict:
        crit = self.calibrate() if crit is None else crit
        return {s: float(rejects(values[:, j], crit[s], DIRECTION[s]).mean())
                for j, s in enumerate(self.cfg.statistics)}

    def type1_check(self, runs: int | None = None) -> dict:
        """Rejection frequency on fresh null runs at the calibrated cutoffs."""
        runs = self.cfg.runs_alt if runs is None else runs
        vals = simulate_statistics(self.cfg, self.K, self.thresholds, 0.0, STREAM_CHECK,
                                   runs, n_jobs=self.n_jobs)
        return self.rejection_rates(vals)

    def alt_values(self, beta: float, theta: float, epsilon: float | None = None) -> np.ndarray:
        eps = self.cfg.n ** (-beta) if epsilon is None else epsilon
        return simulate_statistics(self.cfg, self.K, self.thresholds, eps, STREAM_ALT,
                                   self.cfg.runs_alt, theta=theta, n_jobs=self.n_jobs)

    def power(self, betas=None, thetas=None, critical_values=None,
              type1: dict | None = None) -> list[PowerRow]:
        crit = self.calibrate() if critical_values is None else critical_values
        betas = [self.cfg.beta] if betas is None else list(betas)
        thetas = [self.cfg.theta] if thetas is None else list(thetas)
        type1 = self.type1_check() if type1 is None else type1
        rows = []
        for beta in betas:
            for theta in thetas:
                rates = self.rejection_rates(self.alt_values(beta, theta), crit)
                log.info("beta=%g theta=%g %s", beta, theta,
                         " ".join(f"{s.value}={p:.3f}" for s, p in rates.items()))
                rows.extend(PowerRow(s, beta, theta, crit[s], rates[s], type1[s], self.cfg.seed)
                            for s in self.cfg.statistics)
        return rows


def calibrate(cfg: SimConfig, n_jobs: int = 1) -> dict:
    """Critical values at level ``cfg.alpha`` from ``cfg.runs_null`` null runs."""
    return Experiment(cfg, n_jobs).calibrate()


def power(cfg: SimConfig, critical_values: dict | None = None, betas=None, thetas=None,
          n_jobs: int = 1) -> list[PowerRow]:
    """Power at ``eps = n^-beta`` for every ``(beta, theta)`` cell."""
    return Experiment(cfg, n_jobs).power(betas, thetas, critical_values)


def empirical_risk(null_values, alt_values, direction: Direction) -> float:
    """``min_c [P0(reject at c) + P1(accept at c)]`` over all observed cutoffs."""
    null = np.sort(np.asarray(null_values, dtype=float))
    alt = np.sort(np.asarray(alt_values, dtype=float))
    cuts = np.concatenate([null, alt, [np.inf, -np.inf]])
    if direction is Direction.LARGE:
        type1 = 1.0 - np.searchsorted(null, cuts, side="left") / null.size
        type2 = np.searchsorted(alt, cuts, side="left") / alt.size
    else:
        type1 = np.searchsorted(null, cuts, side="right") / null.size
        type2 = 1.0 - np.searchsorted(alt, cuts, side="right") / alt.size
    return float(np.min(type1 + type2))


def estimate_risk(cfg: SimConfig, statistic_id, n_jobs: int = 1) -> float:
    """Empirical risk of one statistic at ``(cfg.beta, cfg.theta)``."""
    sid = StatisticId(statistic_id)
    exp = Experiment(replace(cfg, statistics=(sid,)), n_jobs)
    null = exp.null_values()[:, 0]
    alt = exp.alt_values(cfg.beta, cfg.theta)[:, 0]
    return empirical_risk(null, alt, DIRECTION[sid])


# -- output ------------------------------------------------------------------

POWER_COLUMNS = ("statistic_id", "beta", "theta", "critical_value", "power", "type1_check",
                 "n", "a0", "family", "samplesize", "seed")


def _fmt(x) -> str:
    return format(float(x), ".17g")


def write_power_csv(path, rows, cfg: SimConfig):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(POWER_COLUMNS)
        for r in rows:
            w.writerow([r.statistic_id.value, _fmt(r.beta), _fmt(r.theta), _fmt(r.critical_value),
                        _fmt(r.power), _fmt(r.type1_check), cfg.n, _fmt(cfg.samplesize.a0),
                        cfg.family.kind.value, cfg.samplesize.kind.value, r.seed_used])


def write_manifest(path, entries: dict):
    """Flat ``key=value`` lines in sorted key order."""
    with open(path, "w") as fh:
        for k in sorted(entries):
            fh.write(f"{k}={entries[k]}\n")


def read_manifest(path) -> dict:
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            k, v = line.split("=", 1)
            out[k.strip().replace("-", "_")] = v.strip()
    return out
