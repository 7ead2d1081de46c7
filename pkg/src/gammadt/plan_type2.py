"""Optimal aperiodic-inspection (type-II) test plans.

The interval vector that maximizes information at fixed (n, m, T) is the
front-loaded one: a single long interval T-(m-1)*dt followed by minimal
ones (the information kernel x^2*psi1(x) is strictly convex, so the
schedule objective is Schur-convex and the most spread-out feasible
vector wins; equal intervals are the worst choice). Interval order is
irrelevant because increments are stationary.

On top of that schedule:

* with no per-inspection cost the budget ignores m, inspections are free
  information, and the closed form (n, m, T) = (1/(2*c_it),
  1/(2*c_op*dt), 1/(2*c_op)) exhausts the budget;
* with c_mea > 0 the cost constraint admits the same eight KKT cases as
  the periodic problem, now in (n, m, T). The interior case solves a
  two-equation stationarity system by nested bracketed bisection (outer
  in m, inner in n), never assuming root uniqueness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ._rootscan import bracketed_roots
from .criteria import CostModel, Criterion, Design, FrontLoaded, Periodic, objective, phi_m_phi_T
from .errors import DomainError, InfeasibleError
from .lifetime import ProcessParams
from .plan_type1 import CandidateRecord, PlanResult, _select

__all__ = [
    "ScheduleSpec",
    "optimal_schedule",
    "optimal_zero_mea",
    "optimal_cost_constrained_t2",
    "relative_efficiency",
]

_BRENT_RTOL = 8.9e-16


@dataclass(frozen=True)
class ScheduleSpec:
    """Front-loaded schedule for m inspections over horizon T with floor dt."""

    m: float
    T: float
    dt: float

    def __post_init__(self):
        if self.m < 1.0:
            raise DomainError(f"m must be >= 1, got {self.m}")
        if self.dt <= 0.0:
            raise DomainError(f"dt must be > 0, got {self.dt}")
        if self.T < self.m * self.dt - 1e-9 * self.dt:
            raise InfeasibleError(f"need T >= m*dt, got T={self.T}, m*dt={self.m * self.dt}")

    @property
    def intervals(self) -> tuple:
        """(T-(m-1)dt, dt, ..., dt); m must be integral to materialize."""
        k = round(self.m)
        if abs(self.m - k) > 1e-9:
            raise DomainError(f"cannot materialize intervals for non-integer m={self.m}")
        return (self.T - (k - 1) * self.dt,) + (self.dt,) * (k - 1)

    @property
    def worst_intervals(self) -> tuple:
        """The least informative feasible schedule: equal intervals T/m."""
        k = round(self.m)
        if abs(self.m - k) > 1e-9:
            raise DomainError(f"cannot materialize intervals for non-integer m={self.m}")
        return (self.T / k,) * k


def optimal_schedule(m: float, T: float, dt: float) -> ScheduleSpec:
    """The information-maximizing interval vector for given (m, T, dt)."""
    return ScheduleSpec(m=m, T=T, dt=dt)


def _feasible_t2(cost: CostModel, n: float, m: float, T: float) -> bool:
    return (
        n >= 1.0 - 1e-9
        and m >= 1.0 - 1e-9
        and T >= m * cost.min_interval * (1.0 - 1e-12)
        and abs(cost.total(n, m, T) - 1.0) <= 1e-9
    )


def optimal_zero_mea(params: ProcessParams, criterion: Criterion, cost: CostModel) -> PlanResult:
    """Cost-optimal design when inspections are free (c_mea = 0).

    Free inspections push m to T/dt (every extra inspection adds
    information at no cost), reducing the schedule to periodic dt; the
    remaining trade maximizes n*T on the budget line, giving
    n = 1/(2*c_it), T = 1/(2*c_op).
    """
    if cost.c_mea != 0.0:
        raise DomainError(f"optimal_zero_mea needs c_mea = 0, got {cost.c_mea}")
    dt = cost.min_interval
    candidates = []

    def add(case, n, T, conditions, note=""):
        n = max(n, 1.0)
        m = T / dt
        feas = m >= 1.0 - 1e-9 and _feasible_t2(cost, n, m, T)
        design = obj = None
        if feas:
            design = Design(n, max(m, 1.0), Periodic(dt))
            obj = objective(params, criterion, design)
        candidates.append(CandidateRecord(case, design, obj, feas, conditions, note))

    n_star, T_star = 1.0 / (2.0 * cost.c_it), 1.0 / (2.0 * cost.c_op)
    interior_ok = n_star >= 1.0 and T_star >= dt
    add("interior", n_star, T_star, interior_ok)
    if not interior_ok:
        # budget corners: pin n at 1, or pin T at the minimum interval
        add("n-at-1", 1.0, (1.0 - cost.c_it) / cost.c_op, True, "fallback")
        add("T-at-dt", (1.0 - cost.c_op * dt) / cost.c_it, dt, True, "fallback")
    return _select(candidates)


def _phi_mt(params, criterion, m, T, dt):
    return phi_m_phi_T(params, criterion, m, T, dt)


def optimal_cost_constrained_t2(
    params: ProcessParams, criterion: Criterion, cost: CostModel
) -> PlanResult:
    """Eight-case budget-exhausting type-II solver (front-loaded schedule)."""
    if cost.c_mea == 0.0:
        return optimal_zero_mea(params, criterion, cost)
    dt = cost.min_interval
    cit, cmea, cop = cost.c_it, cost.c_mea, cost.c_op
    m_full = (1.0 - cit) / (cmea + cop * dt)  # m when n = 1 and T = m*dt
    n_full = (1.0 - cop * dt) / (cit + cmea)  # n when m = 1 and T = dt
    T4 = cost.tau_max

    candidates = []

    def add(case, n, m, T, conditions, note=""):
        n, m = max(n, 1.0), max(m, 1.0)
        feas = _feasible_t2(cost, n, m, T)
        design = obj = None
        if feas:
            design = Design(n, m, FrontLoaded(T=T, dt=dt))
            obj = objective(params, criterion, design)
        candidates.append(CandidateRecord(case, design, obj, feas, conditions, note))

    # ---- case 1: n = 1, (m, T) interior on the budget line
    def T_case1(m):
        return (1.0 - cit - cmea * np.asarray(m)) / cop

    if m_full > 1.0:
        def resid1(m):
            pm, pt = _phi_mt(params, criterion, m, T_case1(m), dt)
            return pm / pt - cmea / cop

        for m1 in bracketed_roots(resid1, 1.0, m_full * (1.0 - 1e-10), n=256,
                                  log_spacing=False, vectorized=True):
            T1 = float(T_case1(m1))
            _, pt = _phi_mt(params, criterion, m1, T1, dt)
            add(1, 1.0, m1, T1, cop / (cit + cmea * m1) < pt)

    # ---- case 2: m = 1, (n, T) interior
    def T_case2(n):
        return (1.0 - np.asarray(n) * (cit + cmea)) / cop

    if n_full > 1.0:
        def resid2(n):
            _, pt = _phi_mt(params, criterion, 1.0, T_case2(n), dt)
            return n * pt - cop / (cit + cmea)

        for n2 in bracketed_roots(resid2, 1.0, n_full * (1.0 - 1e-10), n=256,
                                  log_spacing=False, vectorized=True):
            T2 = float(T_case2(n2))
            pm, _ = _phi_mt(params, criterion, 1.0, T2, dt)
            add(2, n2, 1.0, T2, pm < cmea / (cit + cmea))

    # ---- case 3: fully interior (n, m, T); nested bracketed solve
    def T_case3(n, m):
        return (1.0 - cit * n - cmea * n * m) / cop

    def inner_n(m, polish=True):
        """n solving n*phi_T = c_op/(c_it + c_mea*m) at this m, or None.

        The outer grid scan only needs the root roughly (interpolated);
        Brent polishing is reserved for the outer root refinement.
        """
        n_hi = (1.0 - cop * m * dt) / (cit + cmea * m)
        if n_hi <= 1.0:
            return None

        def res(n):
            _, pt = _phi_mt(params, criterion, m, T_case3(np.asarray(n), m), dt)
            return n * pt - cop / (cit + cmea * m)

        grid = np.linspace(1.0, n_hi * (1.0 - 1e-10), 256)
        vals = np.asarray(res(grid))
        sign_change = np.flatnonzero(np.isfinite(vals[:-1]) & np.isfinite(vals[1:]) & (vals[:-1] * vals[1:] <= 0.0))
        if len(sign_change) == 0:
            return None
        i = int(sign_change[0])
        if not polish:
            v0, v1 = vals[i], vals[i + 1]
            return float(grid[i] - v0 * (grid[i + 1] - grid[i]) / (v1 - v0))
        return brentq(res, grid[i], grid[i + 1], xtol=1e-300, rtol=_BRENT_RTOL)

    def resid3(m, polish=True):
        n = inner_n(m, polish=polish)
        if n is None:
            return math.nan
        pm, _ = _phi_mt(params, criterion, m, T_case3(n, m), dt)
        return pm - cmea / (cit + cmea * m)

    if m_full > 1.0:
        m_grid = np.linspace(1.0, m_full * (1.0 - 1e-10), 256)
        scan = np.array([resid3(m, polish=False) for m in m_grid])
        for i in np.flatnonzero(np.isfinite(scan[:-1]) & np.isfinite(scan[1:]) & (scan[:-1] * scan[1:] < 0.0)):
            a, b = float(m_grid[i]), float(m_grid[i + 1])
            fa, fb = resid3(a), resid3(b)
            if not (np.isfinite(fa) and np.isfinite(fb)):
                continue
            if fa * fb > 0.0:  # interpolation error flipped the bracket; widen
                a = float(m_grid[max(i - 1, 0)])
                b = float(m_grid[min(i + 2, len(m_grid) - 1)])
                fa, fb = resid3(a), resid3(b)
                if not (np.isfinite(fa) and np.isfinite(fb)) or fa * fb > 0.0:
                    continue
            m3 = brentq(resid3, a, b, xtol=1e-300, rtol=_BRENT_RTOL)
            n3 = inner_n(m3)
            if n3 is None:
                continue
            T3 = float(T_case3(n3, m3))
            add(3, n3, m3, T3, n3 > 1.0 and m3 > 1.0 and T3 > m3 * dt)

    # ---- case 4: n = m = 1, all remaining budget on operating time
    pm4, pt4 = _phi_mt(params, criterion, 1.0, T4, dt)
    cond4 = (cop / (cit + cmea) < pt4) and (pm4 / pt4 < cmea / cop)
    add(4, 1.0, 1.0, T4, cond4)

    # ---- case 5: n = 1, T = m*dt
    if m_full >= 1.0:
        pm5, pt5 = _phi_mt(params, criterion, m_full, m_full * dt, dt)
        cond5 = (cmea + dt * cop) / (cit + cmea * m_full) < pm5 + dt * pt5
        add(5, 1.0, m_full, m_full * dt, cond5)

    # ---- case 6: m = 1, T = dt
    if n_full >= 1.0:
        pm6, pt6 = _phi_mt(params, criterion, 1.0, dt, dt)
        cond6 = (n_full * (pm6 + dt * pt6) < (cop * dt + cmea * n_full) / (cit + cmea)) and (
            n_full * pt6 < cop / (cit + cmea)
        )
        add(6, n_full, 1.0, dt, cond6)

    # ---- case 7: (n, m) interior, T = m*dt
    def n_case7(m):
        return (1.0 - cop * np.asarray(m) * dt) / (cit + cmea * np.asarray(m))

    def resid7(m):
        n = n_case7(m)
        pm, pt = _phi_mt(params, criterion, m, np.asarray(m) * dt, dt)
        return n * (pm + dt * pt) - (cop * dt + cmea * n) / (cit + cmea * np.asarray(m))

    if m_full > 1.0:
        for m7 in bracketed_roots(resid7, 1.0, m_full * (1.0 - 1e-10), n=256,
                                  log_spacing=False, vectorized=True):
            n7 = float(n_case7(m7))
            _, pt7 = _phi_mt(params, criterion, m7, m7 * dt, dt)
            add(7, n7, m7, m7 * dt, n7 * pt7 < cop / (cit + cmea * m7))

    # ---- case 8: the budget only fits one unit, one inspection at dt
    cond8 = abs(cit + cmea + cop * dt - 1.0) <= 1e-12
    add(8, 1.0, 1.0, dt, cond8)

    return _select(candidates)


def relative_efficiency(
    params: ProcessParams, criterion: Criterion, reference: Design, candidate: Design
) -> float:
    """phi(reference) / phi(candidate); 1 when the designs tie."""
    return objective(params, criterion, reference) / objective(params, criterion, candidate)
