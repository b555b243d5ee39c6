"""Detection boundaries in the ``(theta, beta)`` plane.

Every curve is the value of a small optimization over a log-scale response
mean ``nu`` and a log-scale sample size ``a``:

* ``BJ``: ``max f(nu, a)`` subject to ``g(nu, a) <= 1`` (thresholded HC, optimal)
* ``BH``: ``max fH(nu, a)`` subject to ``a I(nu) <= 1`` (plain HC)
* ``BB``: ``max fH(nu, a)`` subject to ``a I(nu) = 1`` (Bonferroni)
* ``BR``: ``max f(nu, a)`` subject to ``g(nu, a) = 1`` (rank adjustment)

with ``g = a I(nu) + J(a)``, ``gH = a I(nu) + 2 J(a)``,
``f = a (theta nu - psi(theta)) + (1 - g) / 2`` and
``fH = a (theta nu - psi(theta)) + (1 - gH) / 2``.

Closed forms cover the unconstrained optimum. When the constraint binds, the
optimum is found by a bracketed root of the Lagrange stationarity condition,
written in terms of the tilt ``t = theta*`` with ``nu = mu(t)``. Along
``t >= theta`` (or ``t <= theta`` when ``theta < 0``) the condition is strictly
monotone, so the bracketed root is unique.

:func:`grid_oracle` maximizes the same objectives by brute force and serves as
an independent check.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import expfam as ef
from . import samplesize as ssz
from .expfam import ExpFamilySpec, is_degenerate_theta
from .samplesize import SampleSizeKind, SampleSizeSpec

_XTOL = 1e-15
_T_CAP = 700.0
_DEGENERATE_VALUE = 1.0


class CurveId(str, enum.Enum):
    B = "B"
    BJ = "BJ"
    BH = "BH"
    BB = "BB"
    BR = "BR"


class Regime(str, enum.Enum):
    INTERIOR = "interior"
    CONSTRAINT_ACTIVE = "constraint-active"
    DEGENERATE = "degenerate"


class PhaseSolverError(RuntimeError):
    def __init__(self, message, residuals=None):
        super().__init__(message if residuals is None else f"{message}; residuals={residuals}")
        self.residuals = residuals


@dataclass(frozen=True)
class PhasePoint:
    """One evaluation of a boundary curve.

    ``theta_star`` and ``residual`` are filled for constraint-active points:
    the tilt of the optimal ``nu`` and the Lagrange residual there.
    """

    curve_id: CurveId
    theta: float
    value: float
    regime: Regime
    nu_star: float = math.nan
    a_star: float = math.nan
    theta_star: float = math.nan
    residual: float = math.nan


def gaussian_rho(beta: float) -> float:
    """Classical sparse-Gaussian boundary ``rho(beta)`` for ``beta`` in ``(1/2, 1)``."""
    if not 0.5 < beta < 1.0:
        raise ValueError(f"beta must lie in (1/2, 1), got {beta}")
    if beta <= 0.75:
        return beta - 0.5
    return (1.0 - math.sqrt(1.0 - beta)) ** 2


def _s(spec, theta):
    """``psi(2 theta) - 2 psi(theta)``; equals ``log 2`` in the degenerate Bernoulli limit."""
    if is_degenerate_theta(spec, theta):
        return ef.LOG2
    return ef.psi(spec, 2 * theta) - 2 * ef.psi(spec, theta)


def _objective(spec, ss, theta, nu, a, j_weight):
    """``a (theta nu - psi(theta)) + (1 - a I(nu) - j_weight J(a)) / 2``, vectorized."""
    nu = np.asarray(nu, dtype=float)
    a = np.asarray(a, dtype=float)
    if is_degenerate_theta(spec, theta):
        # theta * nu is 0 at nu = 0 and -inf elsewhere
        lin = np.where(nu == 0.0, ef.LOG2, -np.inf)
    else:
        lin = theta * nu - ef.psi(spec, theta)
    with np.errstate(invalid="ignore"):
        J = np.asarray(ssz.rate_J(ss, a))
        aI = a * np.asarray(ef.rate_I(spec, nu))
        out = a * lin + 0.5 * (1.0 - aI - j_weight * J)
    return np.where(np.isnan(out), -np.inf, out)


def _precheck(spec, ss, theta):
    """True when ``a0 I(mu(theta)) <= 1`` (otherwise Bonferroni already wins)."""
    if is_degenerate_theta(spec, theta):
        i_theta = ef.rate_I(spec, 0.0)
    else:
        i_theta = ef.rate_at_theta(spec, theta)
    return ss.a0 * i_theta <= 1.0 + 1e-12


def _degenerate_point(curve_id, theta):
    return PhasePoint(CurveId(curve_id), theta, _DEGENERATE_VALUE, Regime.DEGENERATE)


def b_homogeneous(spec: ExpFamilySpec, a: float, theta: float) -> PhasePoint:
    """Boundary for a common sample size ``k_n ~ a log n``.

    Central branch ``(1 + a s(theta)) / 2`` for ``theta`` between the half
    tilts ``theta_a^-/2`` and ``theta_a^+/2``, outer branches
    ``a (theta mu_a^+- - psi(theta))`` out to ``theta_a^+-``. Past the tilts
    detection is trivial and the point is tagged degenerate with value 1.
    """
    if not a > 0:
        raise ValueError(f"a must be positive, got {a}")
    if is_degenerate_theta(spec, theta):
        if a * ef.LOG2 > 1.0 + 1e-12:
            return _degenerate_point(CurveId.B, theta)
        return PhasePoint(CurveId.B, theta, 0.5 * (1.0 + a * ef.LOG2), Regime.INTERIOR, 0.0, a)
    te = ef.tilt_endpoints(spec, a)
    if theta > te.theta_plus or theta < te.theta_minus:
        return _degenerate_point(CurveId.B, theta)
    if 0.5 * te.theta_minus <= theta <= 0.5 * te.theta_plus:
        value = 0.5 * (1.0 + a * _s(spec, theta))
        return PhasePoint(CurveId.B, theta, value, Regime.INTERIOR,
                          ef.mu_of_theta(spec, 2 * theta), a)
    edge_mu, edge_theta = ((te.mu_plus, te.theta_plus) if theta > 0
                           else (te.mu_minus, te.theta_minus))
    value = a * (theta * edge_mu - ef.psi(spec, theta))
    return PhasePoint(CurveId.B, theta, value, Regime.CONSTRAINT_ACTIVE,
                      edge_mu, a, edge_theta, 0.0)


# -- deterministic sample sizes: the heterogeneous curves collapse to a0 ----

def _deterministic(curve_id, spec, ss, theta):
    a0 = ss.a0
    if curve_id in (CurveId.BJ, CurveId.BH):
        p = b_homogeneous(spec, a0, theta)
        return PhasePoint(curve_id, theta, p.value, p.regime, p.nu_star, p.a_star,
                          p.theta_star, p.residual)
    # equality constraint a I(nu) = 1 with a <= a0: the best point is a = a0
    if is_degenerate_theta(spec, theta):
        if abs(a0 * ef.LOG2 - 1.0) > 1e-12:
            return PhasePoint(curve_id, theta, math.nan, Regime.DEGENERATE)
        return PhasePoint(curve_id, theta, a0 * ef.LOG2, Regime.CONSTRAINT_ACTIVE, 0.0, a0)
    te = ef.tilt_endpoints(spec, a0)
    mu_e, th_e = (te.mu_plus, te.theta_plus) if theta >= 0 else (te.mu_minus, te.theta_minus)
    if abs(a0 * ef.rate_I(spec, mu_e) - 1.0) > 1e-9:
        return PhasePoint(curve_id, theta, math.nan, Regime.DEGENERATE)
    value = a0 * (theta * mu_e - ef.psi(spec, theta))
    return PhasePoint(curve_id, theta, value, Regime.CONSTRAINT_ACTIVE, mu_e, a0, th_e)


# -- constraint-active solvers ---------------------------------------------

def _a_on_g(spec, ss, i_nu, a1):
    """Solve ``a I + J(a) = 1`` for ``a`` (the left side increases in ``a``)."""
    if i_nu <= 0.0:
        return a1
    hi = min(a1, 1.0 / i_nu)
    h = lambda a: a * i_nu + ssz.rate_J(ss, a) - 1.0
    if h(hi) <= 0.0:
        return hi
    return optimize.brentq(h, 0.0, hi, xtol=_XTOL, rtol=4 * np.finfo(float).eps)


def _mu_and_rate(spec, t):
    """``(mu(t), I(mu(t)), psi(t))`` with support-edge limits for infinite ``t``."""
    if math.isinf(t):
        lo, hi = spec.support
        edge = hi if t > 0 else lo
        if math.isinf(edge):
            raise PhaseSolverError(f"tilt diverged to {t} for unbounded family {spec}")
        return edge, ef.rate_I(spec, edge), math.nan
    return ef.mu_of_theta(spec, t), ef.rate_at_theta(spec, t), ef.psi(spec, t)


def _solve_ray(residual, theta, t_far):
    """Root of a residual decreasing along the ray from ``theta`` through ``t_far``.

    ``t_far=None`` expands ``2 theta, 4 theta, ...``; returns ``inf`` (signed) if
    the residual never changes sign before the tilt cap.
    """
    r0 = residual(theta)
    if r0 <= 0.0:
        return theta
    if t_far is not None:
        r1 = residual(t_far)
        if r1 > 0.0:
            raise PhaseSolverError(f"no sign change on [{theta}, {t_far}]", (r0, r1))
        far = t_far
    else:
        far = 2.0 * theta
        while residual(far) > 0.0:
            if abs(far) > _T_CAP:
                return math.copysign(math.inf, theta)
            far *= 2.0
    lo, hi = sorted((theta, far))
    return optimize.brentq(residual, lo, hi, xtol=_XTOL, rtol=4 * np.finfo(float).eps,
                           maxiter=500)


def _active_g(spec, ss, theta, t_far):
    """Optimum of ``a (theta nu - psi(theta))`` on ``g(nu, a) = 1`` (for BJ and BR)."""
    a1 = ssz.a_one(ss)
    psi_theta = ef.psi(spec, theta)

    def a_of(t):
        _, i_t, _ = _mu_and_rate(spec, t)
        return _a_on_g(spec, ss, i_t, a1)

    def residual(t):
        return ssz.rate_J_prime(ss, a_of(t)) - ef.psi(spec, t) + (t / theta) * psi_theta

    t = _solve_ray(residual, theta, t_far)
    nu, i_t, _ = _mu_and_rate(spec, t)
    a = _a_on_g(spec, ss, i_t, a1)
    res = residual(t) if math.isfinite(t) else math.nan
    value = a * (theta * nu - psi_theta)
    return value, nu, a, t, res


def _active_aI(spec, ss, theta, t_far):
    """Optimum of ``a (theta nu - psi(theta)) - J(a)`` on ``a I(nu) = 1`` (for BH and BB)."""
    psi_theta = ef.psi(spec, theta)

    def residual(t):
        _, i_t, psi_t = _mu_and_rate(spec, t)
        return ssz.rate_J_prime(ss, 1.0 / i_t) - (theta / t) * psi_t + psi_theta

    t = _solve_ray(residual, theta, t_far)
    nu, i_t, _ = _mu_and_rate(spec, t)
    a = 1.0 / i_t
    res = residual(t) if math.isfinite(t) else math.nan
    value = a * (theta * nu - psi_theta) - ssz.rate_J(ss, a)
    return value, nu, a, t, res


# -- heterogeneous curves ----------------------------------------------------

def _theta_zero(curve_id, ss, spec):
    if curve_id in (CurveId.BJ, CurveId.BH):
        return PhasePoint(curve_id, 0.0, 0.5, Regime.INTERIOR, spec.null_mean, ss.a0)
    # only -J(a) remains on the equality constraint; it is 0 for any a <= a0
    return PhasePoint(curve_id, 0.0, 0.0, Regime.CONSTRAINT_ACTIVE, math.nan, ss.a0)


def b_J_curve(spec: ExpFamilySpec, ss: SampleSizeSpec, theta: float) -> PhasePoint:
    """Optimal (thresholded HC) boundary ``b_J(theta)``."""
    cid = CurveId.BJ
    if ss.kind is SampleSizeKind.DETERMINISTIC:
        return _deterministic(cid, spec, ss, theta)
    if not _precheck(spec, ss, theta):
        return _degenerate_point(cid, theta)
    if theta == 0:
        return _theta_zero(cid, ss, spec)
    s = _s(spec, theta)
    a_t = ssz.inverse_J_prime(ss, s)
    if is_degenerate_theta(spec, theta):
        if a_t * ef.LOG2 + ssz.rate_J(ss, a_t) <= 1.0:
            value = 0.5 * (1.0 + a_t * s - ssz.rate_J(ss, a_t))
            return PhasePoint(cid, theta, value, Regime.INTERIOR, 0.0, a_t)
        a = _a_on_g(spec, ss, ef.LOG2, ssz.a_one(ss))
        return PhasePoint(cid, theta, a * ef.LOG2, Regime.CONSTRAINT_ACTIVE, 0.0, a,
                          -math.inf, a * ef.LOG2 + ssz.rate_J(ss, a) - 1.0)
    nu2 = ef.mu_of_theta(spec, 2 * theta)
    if a_t * ef.rate_I(spec, nu2) + ssz.rate_J(ss, a_t) <= 1.0:
        value = 0.5 * (1.0 + a_t * s - ssz.rate_J(ss, a_t))
        return PhasePoint(cid, theta, value, Regime.INTERIOR, nu2, a_t)
    value, nu, a, t, res = _active_g(spec, ss, theta, 2.0 * theta)
    return PhasePoint(cid, theta, value, Regime.CONSTRAINT_ACTIVE, nu, a, t, res)


def b_H_curve(spec: ExpFamilySpec, ss: SampleSizeSpec, theta: float) -> PhasePoint:
    """Boundary ``b_H(theta)`` of HC without thresholding."""
    cid = CurveId.BH
    if ss.kind is SampleSizeKind.DETERMINISTIC:
        return _deterministic(cid, spec, ss, theta)
    if not _precheck(spec, ss, theta):
        return _degenerate_point(cid, theta)
    if theta == 0:
        return _theta_zero(cid, ss, spec)
    half_s = 0.5 * _s(spec, theta)
    a_h = ssz.inverse_J_prime(ss, half_s)
    if is_degenerate_theta(spec, theta):
        if a_h * ef.LOG2 <= 1.0:
            value = 0.5 + a_h * half_s - ssz.rate_J(ss, a_h)
            return PhasePoint(cid, theta, value, Regime.INTERIOR, 0.0, a_h)
        a = 1.0 / ef.LOG2
        return PhasePoint(cid, theta, 1.0 - ssz.rate_J(ss, a), Regime.CONSTRAINT_ACTIVE,
                          0.0, a, -math.inf, 0.0)
    nu2 = ef.mu_of_theta(spec, 2 * theta)
    if a_h * ef.rate_I(spec, nu2) <= 1.0:
        value = 0.5 + a_h * half_s - ssz.rate_J(ss, a_h)
        return PhasePoint(cid, theta, value, Regime.INTERIOR, nu2, a_h)
    value, nu, a, t, res = _active_aI(spec, ss, theta, 2.0 * theta)
    return PhasePoint(cid, theta, value, Regime.CONSTRAINT_ACTIVE, nu, a, t, res)


def b_B_curve(spec: ExpFamilySpec, ss: SampleSizeSpec, theta: float) -> PhasePoint:
    """Bonferroni boundary ``b_B(theta)``: ``fH`` maximized on ``a I(nu) = 1``."""
    cid = CurveId.BB
    if ss.kind is SampleSizeKind.DETERMINISTIC:
        return _deterministic(cid, spec, ss, theta)
    if not _precheck(spec, ss, theta):
        return _degenerate_point(cid, theta)
    if theta == 0:
        return _theta_zero(cid, ss, spec)
    if is_degenerate_theta(spec, theta):
        a = 1.0 / ef.LOG2
        return PhasePoint(cid, theta, 1.0 - ssz.rate_J(ss, a), Regime.CONSTRAINT_ACTIVE,
                          0.0, a, -math.inf, 0.0)
    value, nu, a, t, res = _active_aI(spec, ss, theta, None)
    return PhasePoint(cid, theta, value, Regime.CONSTRAINT_ACTIVE, nu, a, t, res)


def b_R_curve(spec: ExpFamilySpec, ss: SampleSizeSpec, theta: float) -> PhasePoint:
    """Rank-adjustment boundary ``b_R(theta)``: ``f`` maximized on ``g(nu, a) = 1``."""
    cid = CurveId.BR
    if ss.kind is SampleSizeKind.DETERMINISTIC:
        return _deterministic(cid, spec, ss, theta)
    if not _precheck(spec, ss, theta):
        return _degenerate_point(cid, theta)
    if theta == 0:
        return _theta_zero(cid, ss, spec)
    if is_degenerate_theta(spec, theta):
        a = _a_on_g(spec, ss, ef.LOG2, ssz.a_one(ss))
        return PhasePoint(cid, theta, a * ef.LOG2, Regime.CONSTRAINT_ACTIVE, 0.0, a,
                          -math.inf, a * ef.LOG2 + ssz.rate_J(ss, a) - 1.0)
    value, nu, a, t, res = _active_g(spec, ss, theta, None)
    return PhasePoint(cid, theta, value, Regime.CONSTRAINT_ACTIVE, nu, a, t, res)


CURVES = {
    CurveId.BJ: b_J_curve,
    CurveId.BH: b_H_curve,
    CurveId.BB: b_B_curve,
    CurveId.BR: b_R_curve,
}


def curve(curve_id, spec: ExpFamilySpec, ss: SampleSizeSpec, theta: float) -> PhasePoint:
    """Dispatch on curve id; ``B`` is the homogeneous curve at ``a = a0``."""
    curve_id = CurveId(curve_id)
    if curve_id is CurveId.B:
        return b_homogeneous(spec, ss.a0, theta)
    return CURVES[curve_id](spec, ss, theta)


def theta_max(spec: ExpFamilySpec, ss: SampleSizeSpec, cap: float = 5.0) -> float:
    """Largest positive ``theta`` with ``a0 I(mu(theta)) <= 1``, capped for bounded families."""
    return min(ef.tilt_endpoints(spec, ss.a0).theta_plus, cap)


def default_theta_grid(spec: ExpFamilySpec, ss: SampleSizeSpec, num: int = 200) -> np.ndarray:
    top = theta_max(spec, ss)
    return np.linspace(top / num, top, num)


# -- brute-force oracle ------------------------------------------------------

def _bisect_a_on_g(spec, ss, i_nu, a_cap, iters=80):
    """Vectorized bisection for ``a I + J(a) = 1``; NaN where no exact solution exists."""
    i_nu = np.asarray(i_nu, dtype=float)
    lo = np.zeros_like(i_nu)
    hi = np.full_like(i_nu, a_cap)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        with np.errstate(invalid="ignore"):
            over = mid * i_nu + ssz.rate_J(ss, mid) > 1.0
        hi = np.where(over, mid, hi)
        lo = np.where(over, lo, mid)
    a = 0.5 * (lo + hi)
    with np.errstate(invalid="ignore"):
        gap = np.abs(a * i_nu + ssz.rate_J(ss, a) - 1.0)
    return np.where(gap < 1e-9, a, np.nan)


def _nu_range(spec, theta, far_mult=2.0):
    m0 = spec.null_mean
    lo_s, hi_s = spec.support
    target = ef.mu_of_theta(spec, far_mult * theta)
    span = abs(target - m0)
    if theta > 0:
        return m0, min(target + 0.25 * span + 1e-3, hi_s)
    return max(target - 0.25 * span - 1e-3, lo_s), m0


def _a_hi(ss, s):
    if ss.kind is SampleSizeKind.DETERMINISTIC:
        return ss.a0
    hi = 2.0 * ss.a0
    while ssz.rate_J(ss, hi) < hi * s + 1.0:
        hi *= 2.0
    return hi


def _boundary_max(spec, ss, theta, curve_id, nu_lo, nu_hi, num):
    """Max over a 1-d grid in ``nu`` with ``a`` solved from the equality constraint."""
    nu = np.linspace(nu_lo, nu_hi, num)
    i_nu = np.asarray(ef.rate_I(spec, nu))
    if curve_id in (CurveId.BJ, CurveId.BR):
        a = _bisect_a_on_g(spec, ss, i_nu, _a_hi(ss, 0.0))
        j_weight = 1.0
    else:
        with np.errstate(divide="ignore"):
            a = np.where(i_nu > 0, 1.0 / i_nu, np.nan)
        j_weight = 2.0
    vals = np.where(np.isnan(a), -np.inf,
                    _objective(spec, ss, theta, nu, np.nan_to_num(a), j_weight))
    k = int(np.argmax(vals))
    return vals[k], nu[k], a[k], k, nu


def _boundary_oracle(spec, ss, theta, curve_id, num):
    nu_lo, nu_hi = _nu_range(spec, theta)
    lo_s, hi_s = spec.support
    # widen until the maximizer is interior or the support edge is reached
    for _ in range(40):
        v, nu, a, k, grid = _boundary_max(spec, ss, theta, curve_id, nu_lo, nu_hi, num)
        at_far = k == (num - 1 if theta > 0 else 0)
        if not at_far or nu_hi >= hi_s or nu_lo <= lo_s:
            break
        if theta > 0:
            nu_hi = min(spec.null_mean + 2.0 * (nu_hi - spec.null_mean), hi_s)
        else:
            nu_lo = max(spec.null_mean - 2.0 * (spec.null_mean - nu_lo), lo_s)
    h = grid[1] - grid[0]
    lo = max(nu - 2 * h, grid[0])
    hi = min(nu + 2 * h, grid[-1])
    v2, nu2, a2, _, _ = _boundary_max(spec, ss, theta, curve_id, lo, hi, num)
    if v2 >= v:
        return v2, nu2, a2
    return v, nu, a


def _interior_oracle(spec, ss, theta, curve_id, num):
    j_weight = 1.0 if curve_id is CurveId.BJ else 2.0
    nu_lo, nu_hi = _nu_range(spec, theta)
    a_lo, a_hi = 0.5 * ss.a0, _a_hi(ss, _s(spec, theta))

    def grid_max(nl, nh, al, ah):
        nu = np.linspace(nl, nh, num)[:, None]
        a = np.linspace(al, ah, num)[None, :]
        vals = _objective(spec, ss, theta, nu, a, j_weight)
        with np.errstate(invalid="ignore"):
            if curve_id is CurveId.BJ:
                feas = a * np.asarray(ef.rate_I(spec, nu)) + ssz.rate_J(ss, a) <= 1.0
            else:
                feas = a * np.asarray(ef.rate_I(spec, nu)) <= 1.0
        vals = np.where(feas, vals, -np.inf)
        i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
        return vals[i, j], nu[i, 0], a[0, j], (nh - nl) / (num - 1), (ah - al) / (num - 1)

    v, nu, a, hn, ha = grid_max(nu_lo, nu_hi, a_lo, a_hi)
    v2, nu2, a2, _, _ = grid_max(max(nu - 2 * hn, nu_lo), min(nu + 2 * hn, nu_hi),
                                 max(a - 2 * ha, a_lo), min(a + 2 * ha, a_hi))
    if v2 >= v:
        return v2, nu2, a2
    return v, nu, a


def _degenerate_oracle(spec, ss, theta, curve_id, num):
    """Bernoulli ``theta = -inf``: ``nu`` is pinned at 0 and only ``a`` varies."""
    a_hi = _a_hi(ss, ef.LOG2)

    def grid_max(lo, hi):
        a = np.linspace(lo, hi, num)
        i0 = ef.LOG2
        if curve_id is CurveId.BJ:
            vals = _objective(spec, ss, theta, 0.0, a, 1.0)
            vals = np.where(a * i0 + ssz.rate_J(ss, a) <= 1.0, vals, -np.inf)
        elif curve_id is CurveId.BH:
            vals = _objective(spec, ss, theta, 0.0, a, 2.0)
            vals = np.where(a * i0 <= 1.0, vals, -np.inf)
        else:
            vals = np.full_like(a, -np.inf)
        k = int(np.argmax(vals))
        return vals[k], a[k], (hi - lo) / (num - 1)

    if curve_id is CurveId.BB:
        a = 1.0 / ef.LOG2
        return float(_objective(spec, ss, theta, 0.0, a, 2.0)), 0.0, a
    if curve_id is CurveId.BR:
        a = float(_bisect_a_on_g(spec, ss, np.array([ef.LOG2]), a_hi)[0])
        return float(_objective(spec, ss, theta, 0.0, a, 1.0)), 0.0, a
    v, a, h = grid_max(0.0, a_hi)
    v2, a2, _ = grid_max(max(a - 2 * h, 0.0), min(a + 2 * h, a_hi))
    return (v2, 0.0, a2) if v2 >= v else (v, 0.0, a)


def grid_oracle(curve_id, spec: ExpFamilySpec, ss: SampleSizeSpec, theta: float,
                num: int = 401) -> PhasePoint:
    """Brute-force value of a heterogeneous curve.

    Inequality-constrained curves take the larger of a masked 2-d ``(nu, a)``
    grid maximum and the maximum along the constraint boundary; each grid is
    refined once around its argmax. Equality-constrained curves use the
    boundary search only, parameterized by ``nu`` with ``a`` solved exactly
    from the constraint.
    """
    curve_id = CurveId(curve_id)
    if curve_id is CurveId.B:
        raise ValueError("use a deterministic sample-size law for the homogeneous curve")
    if not _precheck(spec, ss, theta):
        return _degenerate_point(curve_id, theta)
    if is_degenerate_theta(spec, theta):
        v, nu, a = _degenerate_oracle(spec, ss, theta, curve_id, 20 * num)
        return PhasePoint(curve_id, theta, float(v), Regime.INTERIOR, nu, a)
    if theta == 0:
        return _theta_zero(curve_id, ss, spec)
    v, nu, a = _boundary_oracle(spec, ss, theta, curve_id, 10 * num)
    regime = Regime.CONSTRAINT_ACTIVE
    if curve_id in (CurveId.BJ, CurveId.BH):
        vi, nui, ai = _interior_oracle(spec, ss, theta, curve_id, num)
        if vi > v:
            v, nu, a, regime = vi, nui, ai, Regime.INTERIOR
    if not np.isfinite(v):
        return PhasePoint(curve_id, theta, math.nan, Regime.DEGENERATE)
    return PhasePoint(curve_id, theta, float(v), regime, float(nu), float(a))
