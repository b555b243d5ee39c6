"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are printed even
under output capture), or directly with ``python3 tests/test_acceptance.py``.
Seeds are fixed in advance; none were tuned to make a criterion pass.
"""

from __future__ import annotations

import math
import sys
import time
from contextlib import contextmanager

import numpy as np
import pytest
from scipy import optimize
from scipy import stats as sps

from hetdetect import mc
from hetdetect.cli import main as cli_main
from hetdetect.expfam import BERNOULLI_HALF, GAUSSIAN, POISSON, psi
from hetdetect.phase import (CurveId, Regime, b_H_curve, b_homogeneous, b_J_curve, curve,
                             default_theta_grid, gaussian_rho, grid_oracle)
from hetdetect.pvalues import PValueSet, pvalues_for_dataset
from hetdetect.samplesize import get_samplesize
from hetdetect.stats import StatisticId, hc, rank_adjust, ranks

LOG2 = math.log(2)


@pytest.fixture
def report(request):
    """Yields a callable ``report(criterion, ok, detail)`` that prints past capture."""
    capman = request.config.pluginmanager.getplugin("capturemanager")

    def _report(criterion, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
        if capman is not None:
            with capman.global_and_fixture_disabled():
                print("\n" + line, flush=True)
        else:
            print(line, flush=True)

    return _report


@contextmanager
def timer():
    box = {}
    t0 = time.perf_counter()
    yield box
    box["s"] = time.perf_counter() - t0


# -- 1 ----------------------------------------------------------------------

def gaussian_closed_form(a, theta):
    x = a * theta ** 2
    return 0.5 * (1 + x) if x <= 0.5 else 1 - (1 - math.sqrt(x / 2)) ** 2


def test_criterion_1_gaussian_homogeneous(report):
    with timer() as t:
        grid = np.linspace(-math.sqrt(2), math.sqrt(2), 100)
        err = max(abs(b_homogeneous(GAUSSIAN, 1.0, th).value - gaussian_closed_form(1.0, th))
                  for th in grid)
        rho = gaussian_rho(0.75)
        th = math.sqrt(0.5)
        jump = abs(b_homogeneous(GAUSSIAN, 1.0, th * (1 - 1e-13)).value
                   - b_homogeneous(GAUSSIAN, 1.0, th * (1 + 1e-13)).value)
        # the two branches of rho agree at beta = 3/4
        rho_branches = (0.75 - 0.5, (1 - math.sqrt(0.25)) ** 2)
    ok = err < 1e-10 and rho == 0.25 and jump < 1e-10 and rho_branches[0] == rho_branches[1]
    ok = ok and t["s"] < 1.0
    report(1, ok, f"max |b - closed form| = {err:.2e} on 100 points, rho(0.75) = {rho!r}, "
                  f"branch jump {jump:.1e}, {t['s']:.3f}s")
    assert ok


# -- 2 ----------------------------------------------------------------------

def point_mass_second_regime_fH(a0):
    a = 1 / LOG2
    return a * LOG2 + 0.5 * (1 - a * LOG2 - 2 * (a * math.log(a / a0) - a + a0))


def test_criterion_2_point_mass_closed_forms(report):
    with timer() as t:
        errs = {}
        for a0 in (0.3, 0.5, 1.0):
            v = b_H_curve(BERNOULLI_HALF, get_samplesize("poisson-max1", a0, 1e5), -math.inf)
            errs[a0] = abs(v.value - (0.5 + a0 * (math.sqrt(2) - 1)))
        v12 = b_H_curve(BERNOULLI_HALF, get_samplesize("poisson-max1", 1.2, 1e5), -math.inf).value
        closed = 1 + math.log(1.2 * math.e * LOG2) / LOG2 - 1.2
        errs[1.2] = max(abs(v12 - closed), abs(v12 - point_mass_second_regime_fH(1.2)))
    ok = max(errs.values()) < 1e-6 and t["s"] < 1.0
    report("2", ok, "within 1e-6 of the closed forms: "
           + ", ".join(f"a0={a}: {e:.1e}" for a, e in errs.items())
           + f"; b_H(a0=1.2) = {v12:.7f}, {t['s']:.3f}s")
    assert ok


@pytest.mark.xfail(strict=True, reason="quoted decimal 0.97702 contradicts its own closed form "
                                       "(0.976963); see the decisions ledger")
def test_criterion_2_quoted_decimal(report):
    v = b_H_curve(BERNOULLI_HALF, get_samplesize("poisson-max1", 1.2, 1e5), -math.inf).value
    ok = abs(v - 0.97702) <= 1e-5
    report("2 (quoted 0.97702 +/- 1e-5)", ok,
           f"computed {v:.7f}, closed form {1 + math.log(1.2 * math.e * LOG2) / LOG2 - 1.2:.7f}, "
           f"|diff| = {abs(v - 0.97702):.2e}")
    assert ok


# -- 3 ----------------------------------------------------------------------

def interior_closed_forms(spec, ss, theta):
    """Interior closed forms of b_J and b_H for Poisson and rounded-normal J at ``theta``."""
    s = psi(spec, 2 * theta) - 2 * psi(spec, theta)
    a0 = ss.a0
    if ss.kind.value == "poisson-max1":
        bj = 0.5 * (1 + a0 * (math.exp(s) - 1))
        bh = 0.5 + a0 * (math.exp(s / 2) - 1)
    else:
        tau = ss.tau
        bj = 0.5 * (1 + a0 * (s + tau * s ** 2 / 2))
        bh = 0.5 * (1 + a0 * (s + tau * s ** 2 / 4))
    return bj, bh


def test_criterion_3_oracle_equivalence(report):
    pm = get_samplesize("poisson-max1", 0.5, 1e5)
    rn = get_samplesize("rounded-normal", 0.5, 1e5, tau=1.0)
    worst, count, spot_err = 0.0, 0, 0.0
    with timer() as t:
        for spec in (GAUSSIAN, POISSON):
            for ss in (pm, rn):
                lo, hi = -default_theta_grid(spec, ss, 2)[-1], default_theta_grid(spec, ss, 2)[-1]
                if spec is POISSON:
                    lo = max(lo, -4.0)
                for theta in np.linspace(lo, hi, 50):
                    for cid in (CurveId.BJ, CurveId.BH, CurveId.BB, CurveId.BR):
                        p = curve(cid, spec, ss, theta)
                        if p.regime is Regime.DEGENERATE:
                            continue
                        o = grid_oracle(cid, spec, ss, theta)
                        worst = max(worst, abs(p.value - o.value))
                        count += 1
                for theta in (0.1, 0.25, 0.5):
                    bj_cf, bh_cf = interior_closed_forms(spec, ss, theta)
                    bj, bh = b_J_curve(spec, ss, theta), b_H_curve(spec, ss, theta)
                    assert bj.regime is Regime.INTERIOR and bh.regime is Regime.INTERIOR
                    spot_err = max(spot_err, abs(bj.value - bj_cf), abs(bh.value - bh_cf))
        gj = b_J_curve(GAUSSIAN, pm, 0.5).value
        gh = b_H_curve(GAUSSIAN, pm, 0.5).value
    ok = (worst < 1e-4 and spot_err < 1e-10 and abs(gj - 0.571007) < 1e-6
          and abs(gh - 0.566574) < 1e-6 and t["s"] < 120)
    report(3, ok, f"{count} curve points, max |curve - oracle| = {worst:.2e}; interior closed forms "
                  f"closed forms to {spot_err:.1e}; b_J(0.5) = {gj:.6f}, b_H(0.5) = {gh:.6f}, "
                  f"{t['s']:.1f}s")
    assert ok


# -- 4 ----------------------------------------------------------------------

def hc_two_loop(p):
    n = len(p)
    pool, ordered = list(map(float, p)), []
    while pool:
        j = min(range(len(pool)), key=lambda t: (pool[t], t))
        ordered.append(pool.pop(j))
    best = -math.inf
    for i in range(1, n // 2 + 1):
        q = ordered[i - 1]
        if q < 1.0:
            best = max(best, (i - n * q) / math.sqrt(n * q * (1.0 - q)))
    return best


def test_criterion_4_statistic_oracles(report):
    rng = np.random.default_rng(404)
    hc_bad = ra_bad = 0
    with timer() as t:
        for _ in range(500):
            n = int(rng.integers(2, 65))
            p = rng.random(n) ** rng.uniform(0.5, 4)
            hc_bad += hc(p).value != hc_two_loop(p)
        for _ in range(1000):
            n = int(rng.integers(1, 50))
            K = rng.integers(1, int(rng.integers(2, 6)), n)
            p = rng.random(n)
            if rng.random() < 0.5:
                p = np.round(p, 1) + 0.05
            pv = PValueSet(p, K)
            r = ranks(K).r
            form_a = float(np.min(r * p))
            form_b = min(np.sum(K >= k) * p[K >= k].min() for k in np.unique(K))
            ra_bad += not (form_a == form_b == rank_adjust(pv).value)
    ok = hc_bad == 0 and ra_bad == 0 and t["s"] < 30
    report(4, ok, f"HC mismatches {hc_bad}/500, rank-adjust form mismatches {ra_bad}/1000, "
                  f"{t['s']:.2f}s")
    assert ok


# -- 5 ----------------------------------------------------------------------

def test_criterion_5_pvalue_uniformity(report):
    rng = np.random.default_rng(505)
    n = 100_000
    results = []
    with timer() as t:
        for spec in (GAUSSIAN, POISSON, BERNOULLI_HALF):
            for k in (1, 3, 10):
                if spec is GAUSSIAN:
                    Y = rng.normal(0, math.sqrt(k), n)
                elif spec is POISSON:
                    Y = rng.poisson(k, n).astype(float)
                else:
                    Y = rng.binomial(k, 0.5, n).astype(float)
                pv = pvalues_for_dataset(spec, Y, np.full(n, k), seed=rng)
                ks = sps.kstest(pv.p, "uniform")
                results.append((spec.kind.value, k, ks.pvalue))
    ok = all(r[2] > 0.01 for r in results) and t["s"] < 60
    worst = min(results, key=lambda r: r[2])
    report(5, ok, f"9 KS tests at 1e5 draws, smallest KS p-value {worst[2]:.3f} "
                  f"({worst[0]}, k={worst[1]}), {t['s']:.2f}s")
    assert ok


# -- 6 ----------------------------------------------------------------------

def test_criterion_6_null_calibration(report):
    with timer() as t:
        cfg = mc.desk_profile(runs_null=200, runs_alt=1000, seed=0)
        exp = mc.Experiment(cfg)
        t1 = exp.type1_check()
    ok = all(0.03 <= v <= 0.07 for v in t1.values()) and t["s"] < 600
    report(6, ok, "Type I at calibrated cutoffs: "
           + ", ".join(f"{s.value}={v:.3f}" for s, v in t1.items()) + f", {t['s']:.1f}s")
    assert ok


# -- 7 ----------------------------------------------------------------------

def test_criterion_7_fwer_bound(report):
    n, reps, alpha = 1000, 10_000, 0.05
    bound = alpha + 3 * math.sqrt(alpha * (1 - alpha) / reps)
    rng = np.random.default_rng(707)
    freqs = {}
    with timer() as t:
        designs = {
            "poisson-K": mc.sample_K(get_samplesize("poisson-max1", 0.5, n), n, 7),
            "distinct-K": np.arange(1, n + 1),
        }
        cut = alpha / (1 + math.log(n))
        for name, K in designs.items():
            r = ranks(K).r
            hits = 0
            for _ in range(reps // 1000):
                U = rng.random((1000, n))
                hits += int(np.sum(np.min(r * U, axis=1) <= cut))
            freqs[name] = hits / reps
    ok = all(f <= bound for f in freqs.values()) and t["s"] < 60
    report(7, ok, ", ".join(f"{k}: {v:.4f}" for k, v in freqs.items())
           + f" (bound {bound:.4f}), {t['s']:.2f}s")
    assert ok


# -- 8 ----------------------------------------------------------------------

def boundary_theta(beta, a0=0.5, n=10_000):
    """theta > 0 with b_J(theta) = beta for Poisson(a0 log n) sample sizes.

    The negative-binomial law has no closed-form rate function, so its
    Poisson counterpart with the same a0 serves as the proxy.
    """
    ss = get_samplesize("poisson-max1", a0, n)
    return optimize.brentq(lambda th: b_J_curve(GAUSSIAN, ss, th).value - beta, 1e-6, 1.4,
                           xtol=1e-12)


def test_criterion_8_figure2_orderings(report):
    betas = (0.55, 0.65)
    with timer() as t:
        cfg = mc.desk_profile(samplesize="negbin", a0=0.5, runs_null=999, runs_alt=1000,
                              seed=20261016)
        exp = mc.Experiment(cfg)
        crit = exp.calibrate()
        power = {}
        for beta in betas:
            theta = boundary_theta(beta)
            rates = exp.rejection_rates(exp.alt_values(beta, theta), crit)
            power[beta] = (theta, rates)
    S = StatisticId
    checks = []
    for beta, (theta, p) in power.items():
        checks.append(p[S.HC_THRES] >= p[S.HC] - 0.05)
        checks.append(p[S.RANK_ADJUST] >= p[S.BONFERRONI] - 0.05)
        checks.append(p[S.RANK_ADJUST] - p[S.BONFERRONI] > p[S.HC_THRES] - p[S.HC] - 0.05)
    checks.append(power[0.65][1][S.CHI_SQ] <= power[0.65][1][S.HC])
    ok = all(checks) and t["s"] < 1800
    detail = "; ".join(
        f"beta={b} theta={th:.3f}: " + " ".join(f"{s.value}={v:.3f}" for s, v in p.items())
        for b, (th, p) in power.items())
    report(8, ok, f"{detail}; {sum(checks)}/{len(checks)} orderings hold, {t['s']:.1f}s")
    assert ok


# -- 9 ----------------------------------------------------------------------

def test_criterion_9_determinism(report, tmp_path):
    args = ["power", "--family", "poisson", "--samplesize", "negbin", "--a0", "0.5",
            "--n", "2000", "--runs-null", "39", "--runs-alt", "30", "--seed", "99",
            "--beta-grid", "0.55,0.65", "--theta-grid", "0.3,0.8",
            "--thresholds-m", "60,200,600,2000"]
    with timer() as t:
        out = [tmp_path / f"p{i}.csv" for i in range(4)]
        rc = [cli_main(args + ["--out", str(out[0])]),
              cli_main(args + ["--out", str(out[1])]),
              cli_main(args + ["--out", str(out[2]), "--jobs", "3"]),
              cli_main(["power", "--config", f"{out[0]}.manifest", "--out", str(out[3])])]
        curves = [tmp_path / f"c{i}.csv" for i in range(2)]
        for c in curves:
            rc.append(cli_main(["curves", "--family", "poisson", "--a0", "0.5",
                                "--theta-grid", "-1:1:21", "--out", str(c)]))
    same = len({p.read_bytes() for p in out}) == 1
    same_curves = curves[0].read_bytes() == curves[1].read_bytes()
    ok = rc == [0] * 6 and same and same_curves
    report(9, ok, f"power CSV identical across repeat, 3 workers and manifest replay: {same}; "
                  f"curves CSV identical: {same_curves}, {t['s']:.1f}s")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-rA"]))
