"""Optimal periodic-inspection (type-I) test plans.

Three planning scenarios:

* fixed (n, m): only the interval tau is free. The D objective always
  improves with larger tau; the A/V objectives do too when the curvature
  index h2^2/(alpha*h1)^2 is at least 2/3, and otherwise dip at the unique
  interior point tau = omega_inverse(-index)/alpha.
* fixed (n, T): the information kernel tau*psi1(alpha*tau) is decreasing,
  so the best interval is always the smallest allowed one.
* cost-constrained: the budget c_it*n + c_mea*n*m + c_op*m*tau = 1 admits
  eight KKT cases (interior/boundary combinations of n >= 1, m >= 1,
  tau >= dt). The solver builds every case's candidate design, checks each
  case's sufficient conditions and raw feasibility, and returns the best
  feasible candidate; uniqueness of stationarity roots is never assumed
  (every sign change of phi - K on a 512-point log grid is kept).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

from ._rootscan import bracketed_roots
from .criteria import (
    CostModel,
    Criterion,
    Design,
    Periodic,
    cost_indices,
    k1,
    k2,
    k3,
    objective,
    phi_tau,
    _v_ratio,
)
from .errors import DomainError, InfeasibleError
from .lifetime import ProcessParams
from .specfun import omega_inverse

__all__ = [
    "PlanResult",
    "CandidateRecord",
    "optimal_tau_fixed_nm",
    "optimal_tau_fixed_nT",
    "optimal_cost_constrained",
]

_FEAS_TOL = 1e-9


@dataclass(frozen=True)
class CandidateRecord:
    """One evaluated construction: which case produced it and how it fared."""

    case: Union[int, str]
    design: Optional[Design]
    objective_value: Optional[float]
    feasible: bool
    conditions_met: bool
    note: str = ""


@dataclass(frozen=True)
class PlanResult:
    design: Optional[Design]
    objective_value: Optional[float]
    case_label: Union[int, str]
    diagnostics: tuple = field(default_factory=tuple)
    selected_by: str = "sufficient-conditions"


def optimal_tau_fixed_nm(
    params: ProcessParams,
    criterion: Criterion,
    n: float,
    m: float,
    dt: float,
    tau_max: Optional[float] = None,
) -> PlanResult:
    """Best periodic interval when the unit and inspection counts are fixed.

    Returns the interior optimum max(dt, omega_inverse(-index)/alpha) when
    it exists; otherwise reports that the objective keeps improving with
    tau (clamped to ``tau_max`` when one is supplied).
    """
    if n < 1.0 or m < 1.0:
        raise DomainError(f"need n, m >= 1, got n={n}, m={m}")
    if dt <= 0.0:
        raise DomainError(f"need dt > 0, got {dt}")
    if criterion.kind != "D":
        ratio = _v_ratio(params, criterion)
        if ratio < 2.0 / 3.0:
            tau = max(dt, omega_inverse(-ratio) / params.alpha)
            if tau_max is not None:
                tau = min(tau, tau_max)
            design = Design(n, m, Periodic(tau))
            return PlanResult(
                design=design,
                objective_value=objective(params, criterion, design),
                case_label="interior" if tau > dt else "min-interval",
                diagnostics=(CandidateRecord("interior", design, None, True, True, f"index={ratio:.6g}"),),
            )
        note = f"index={ratio:.6g} >= 2/3: objective decreases in tau"
    else:
        note = "D objective decreases in tau for all tau"
    if tau_max is not None:
        design = Design(n, m, Periodic(tau_max))
        return PlanResult(
            design=design,
            objective_value=objective(params, criterion, design),
            case_label="no-interior-optimum",
            diagnostics=(CandidateRecord("no-interior-optimum", design, None, True, True, note),),
        )
    return PlanResult(
        design=None,
        objective_value=None,
        case_label="no-interior-optimum",
        diagnostics=(CandidateRecord("no-interior-optimum", None, None, False, True, note),),
    )


def optimal_tau_fixed_nT(
    params: ProcessParams,
    n: float,
    T: float,
    dt: float,
    criterion: Optional[Criterion] = None,
) -> PlanResult:
    """With the horizon fixed, the smallest interval is optimal for all
    three criteria; m = T/dt (real-valued)."""
    if T < dt:
        raise InfeasibleError(f"T={T} is below the minimum interval {dt}")
    design = Design(n, T / dt, Periodic(dt))
    value = objective(params, criterion, design) if criterion is not None else None
    return PlanResult(
        design=design,
        objective_value=value,
        case_label="min-interval",
        diagnostics=(CandidateRecord("min-interval", design, value, True, True, ""),),
    )


def _case3_nm(cost: CostModel, tau: float) -> tuple:
    """Interior-case unit/inspection counts at interval tau."""
    q = cost.c_mea * cost.c_it / (cost.c_op * tau)
    s = math.sqrt(cost.c_it**2 + q)
    return (s - cost.c_it) / q, (s - cost.c_it) / cost.c_mea


def _feasible(cost: CostModel, n: float, m: float, tau: float) -> bool:
    return (
        n >= 1.0 - _FEAS_TOL
        and m >= 1.0 - _FEAS_TOL
        and tau >= cost.min_interval * (1.0 - 1e-12)
        and tau <= cost.tau_max * (1.0 + 1e-12)
        and abs(cost.total(n, m, m * tau) - 1.0) <= 1e-9
    )


def optimal_cost_constrained(
    params: ProcessParams, criterion: Criterion, cost: CostModel
) -> PlanResult:
    """Eight-case budget-exhausting type-I solver.

    Candidates whose sufficient conditions hold are preferred; if none
    fire (a numeric edge), the best raw-feasible candidate is returned
    with ``selected_by="enumeration"``.
    """
    if cost.c_mea == 0.0:
        raise DomainError(
            "c_mea = 0 collapses the case geometry; use plan_type2.optimal_zero_mea"
        )
    dt = cost.min_interval
    if abs(cost.c_it + cost.c_mea + cost.c_op * dt - 1.0) <= 1e-12:
        # case 8: the budget fits exactly one unit, one inspection at dt
        design = Design(1.0, 1.0, Periodic(dt))
        value = objective(params, criterion, design)
        return PlanResult(design, value, 8, (CandidateRecord(8, design, value, True, True),))
    tau_hi = cost.tau_max
    slack = 1.0 - 2.0 * cost.c_it - cost.c_mea
    interior_regime = slack > 0.0
    if interior_regime:
        i1, i2, _ = cost_indices(cost)
    phi = lambda t: phi_tau(params, criterion, t)
    lo = min(dt * 1e-3, tau_hi * 1e-6)

    candidates = []

    def add(case, n, m, tau, conditions, note=""):
        n, m = max(n, 1.0), max(m, 1.0)  # forgive roundoff at the bounds
        feas = _feasible(cost, n, m, tau)
        design = obj = None
        if feas:
            design = Design(n, m, Periodic(tau))
            obj = objective(params, criterion, design)
        candidates.append(CandidateRecord(case, design, obj, feas, conditions, note))

    # stationarity roots against each boundary function
    roots1 = bracketed_roots(lambda t: phi(t) - k1(cost, t), lo, tau_hi, vectorized=True)
    roots2 = bracketed_roots(lambda t: phi(t) - k2(cost, t), lo, tau_hi * (1.0 - 1e-12), vectorized=True)
    roots3 = bracketed_roots(lambda t: phi(t) - k3(cost, t), lo, tau_hi, vectorized=True)

    for t1 in roots1:  # case 1: n = 1, m interior
        cond = dt < t1 and (
            (interior_regime and t1 < i1) or ((not interior_regime) and t1 < tau_hi)
        )
        add(1, 1.0, (1.0 - cost.c_it) / (cost.c_mea + cost.c_op * t1), t1, cond)

    for t2 in roots2:  # case 2: m = 1, n interior
        cond = interior_regime and max(i2, dt) < t2 < tau_hi
        add(2, (1.0 - cost.c_op * t2) / (cost.c_it + cost.c_mea), 1.0, t2, cond)

    for t3 in roots3:  # case 3: fully interior
        cond = interior_regime and max(i1, dt) < t3 < i2
        n3, m3 = _case3_nm(cost, t3)
        add(3, n3, m3, t3, cond)

    # case 4: n = m = 1, tau at the budget limit
    cond4 = phi(tau_hi) > max(
        cost.c_op / (cost.c_it + cost.c_mea), cost.c_op / (1.0 - cost.c_it)
    )
    add(4, 1.0, 1.0, tau_hi, cond4)

    # case 5: n = 1, tau at the minimum interval
    cond5 = phi(dt) < k1(cost, dt) and ((interior_regime and dt < i1) or not interior_regime)
    add(5, 1.0, (1.0 - cost.c_it) / (cost.c_mea + cost.c_op * dt), dt, cond5)

    # case 6: m = 1, tau at the minimum interval
    cond6 = phi(dt) < k2(cost, dt) and interior_regime and dt > i2
    add(6, (1.0 - cost.c_op * dt) / (cost.c_it + cost.c_mea), 1.0, dt, cond6)

    # case 7: interior (n, m), tau at the minimum interval
    cond7 = phi(dt) < k3(cost, dt) and interior_regime and i1 < dt < i2
    n7, m7 = _case3_nm(cost, dt)
    add(7, n7, m7, dt, cond7)

    # case 8: the budget only fits one unit, one inspection at dt
    cond8 = abs(cost.c_it + cost.c_mea + cost.c_op * dt - 1.0) <= 1e-12
    add(8, 1.0, 1.0, dt, cond8)

    return _select(candidates)


def _select(candidates) -> PlanResult:
    diag = tuple(candidates)
    preferred = [c for c in candidates if c.feasible and c.conditions_met]
    pool, selected_by = (preferred, "sufficient-conditions") if preferred else (
        [c for c in candidates if c.feasible],
        "enumeration",
    )
    if not pool:
        raise InfeasibleError("no feasible candidate design under the budget")
    best = min(pool, key=lambda c: (c.objective_value, c.case if isinstance(c.case, int) else 99))
    return PlanResult(
        design=best.design,
        objective_value=best.objective_value,
        case_label=best.case,
        diagnostics=diag,
        selected_by=selected_by,
    )
