"""Design objects, Fisher information, and the D/A/V design objectives.

For a test with n units inspected at intervals (dt_1, ..., dt_m),
T = sum(dt_j), the Fisher information of (alpha, gamma) is diagonal:

    I = n * [[ sum_j dt_j^2*psi1(alpha*dt_j) - T/alpha , 0 ],
             [ 0                                       , alpha*T ]]

The (1,1) entry is accumulated as sum_j (dt_j/alpha) * (x_j*psi1(x_j) - 1)
with x_j = alpha*dt_j, which is exact term-by-term and never cancels.

Objectives: phi_D = det(I^-1), phi_A = tr(I^-1), phi_V = h' I^-1 h with h
the lifetime-quantile gradient. Three schedule families share the code
path: Periodic (equal intervals, real-valued inspection count), Aperiodic
(explicit intervals), and FrontLoaded (one long interval T-(m-1)*dt then
minimal ones, the optimal aperiodic family; real-valued m uses the
continuous relaxation of the interval sum).

Also here: the analytic log-derivatives phi(tau) of the periodic
objectives, the cost-geometry boundary functions K1/K2/K3 with the
piecewise K(tau), and the front-loaded family's varrho objectives with
their partial log-derivatives in (m, T). These feed the planners'
root-finding; everything broadcasts over numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Union

import numpy as np

from .errors import DomainError, InfeasibleError, NumericError
from .lifetime import LifetimeSpec, ProcessParams, SensitivityVector, sensitivity_vector
from .specfun import info_slack, info_slack_deriv, trigamma

__all__ = [
    "Periodic",
    "Aperiodic",
    "FrontLoaded",
    "Design",
    "Criterion",
    "CostModel",
    "KBoundaries",
    "fisher_information",
    "objective",
    "phi_tau",
    "k_boundaries",
    "cost_indices",
    "varrho_type2",
    "phi_m_phi_T",
]


@dataclass(frozen=True)
class Periodic:
    """Equal inspection intervals of length tau."""

    tau: float

    def __post_init__(self):
        if not (math.isfinite(self.tau) and self.tau > 0.0):
            raise DomainError(f"tau must be > 0, got {self.tau}")


@dataclass(frozen=True)
class Aperiodic:
    """Explicit inspection intervals; the design's m must equal their count."""

    intervals: tuple

    def __post_init__(self):
        iv = tuple(float(v) for v in self.intervals)
        if len(iv) == 0 or any(not math.isfinite(v) or v <= 0.0 for v in iv):
            raise DomainError("intervals must be a non-empty tuple of positive reals")
        object.__setattr__(self, "intervals", iv)


@dataclass(frozen=True)
class FrontLoaded:
    """One interval of length T-(m-1)*dt followed by m-1 intervals of dt.

    Real-valued m is allowed; the interval sum then uses the continuous
    form (m-1)*dt^2*psi1(alpha*dt) + u^2*psi1(alpha*u), u = T-(m-1)*dt.
    """

    T: float
    dt: float

    def __post_init__(self):
        if not (math.isfinite(self.T) and self.T > 0.0):
            raise DomainError(f"T must be > 0, got {self.T}")
        if not (math.isfinite(self.dt) and self.dt > 0.0):
            raise DomainError(f"dt must be > 0, got {self.dt}")


Schedule = Union[Periodic, Aperiodic, FrontLoaded]


@dataclass(frozen=True)
class Design:
    """A test plan: n units, m inspections per unit, and a schedule."""

    n: float
    m: float
    schedule: Schedule

    def __post_init__(self):
        if not (math.isfinite(self.n) and self.n >= 1.0):
            raise DomainError(f"n must be >= 1, got {self.n}")
        if not (math.isfinite(self.m) and self.m >= 1.0):
            raise DomainError(f"m must be >= 1, got {self.m}")
        if isinstance(self.schedule, Aperiodic) and round(self.m) != len(self.schedule.intervals):
            raise DomainError(
                f"m={self.m} does not match the {len(self.schedule.intervals)} explicit intervals"
            )
        if isinstance(self.schedule, FrontLoaded):
            if self.schedule.T < self.m * self.schedule.dt - 1e-9 * self.schedule.dt:
                raise InfeasibleError(
                    f"front-loaded schedule needs T >= m*dt, got T={self.schedule.T}, "
                    f"m*dt={self.m * self.schedule.dt}"
                )

    @property
    def T(self) -> float:
        if isinstance(self.schedule, Periodic):
            return self.m * self.schedule.tau
        if isinstance(self.schedule, Aperiodic):
            return float(sum(self.schedule.intervals))
        return self.schedule.T

    def intervals(self) -> tuple:
        """Concrete inspection intervals; m must be integral."""
        if isinstance(self.schedule, Aperiodic):
            return self.schedule.intervals
        k = round(self.m)
        if abs(self.m - k) > 1e-9:
            raise DomainError(f"cannot materialize intervals for non-integer m={self.m}")
        if isinstance(self.schedule, Periodic):
            return (self.schedule.tau,) * k
        u = self.schedule.T - (k - 1) * self.schedule.dt
        return (u,) + (self.schedule.dt,) * (k - 1)


@dataclass(frozen=True)
class Criterion:
    """Optimality criterion: kind in {"D", "A", "V"}; V needs a LifetimeSpec."""

    kind: str
    lifetime: Optional[LifetimeSpec] = None

    def __post_init__(self):
        if self.kind not in ("D", "A", "V"):
            raise DomainError(f"criterion kind must be D, A or V, got {self.kind!r}")
        if self.kind == "V" and self.lifetime is None:
            raise DomainError("V-optimality requires a LifetimeSpec")


@dataclass(frozen=True)
class CostModel:
    """Unit, inspection and operating costs, normalized to budget 1.

    c_it: cost per test unit; c_mea: cost per inspection; c_op: cost per
    unit time; min_interval: smallest allowed inspection interval.
    """

    c_it: float
    c_mea: float
    c_op: float
    min_interval: float

    def __post_init__(self):
        if not (math.isfinite(self.c_it) and self.c_it > 0.0):
            raise DomainError(f"c_it must be > 0, got {self.c_it}")
        if not (math.isfinite(self.c_mea) and self.c_mea >= 0.0):
            raise DomainError(f"c_mea must be >= 0, got {self.c_mea}")
        if not (math.isfinite(self.c_op) and self.c_op > 0.0):
            raise DomainError(f"c_op must be > 0, got {self.c_op}")
        if not (math.isfinite(self.min_interval) and self.min_interval > 0.0):
            raise DomainError(f"min_interval must be > 0, got {self.min_interval}")
        if self.c_it + self.c_mea + self.c_op * self.min_interval > 1.0 + 1e-12:
            raise InfeasibleError(
                "no design fits the budget: c_it + c_mea + c_op*min_interval = "
                f"{self.c_it + self.c_mea + self.c_op * self.min_interval:.6g} > 1"
            )

    @property
    def tau_max(self) -> float:
        """Largest interval any budget-exhausting design can use."""
        return (1.0 - self.c_it - self.c_mea) / self.c_op

    def total(self, n, m, T) -> float:
        """TC(n, m, T) = c_it*n + c_mea*n*m + c_op*T."""
        return self.c_it * n + self.c_mea * n * m + self.c_op * T


@lru_cache(maxsize=512)
def _h_cached(params: ProcessParams, spec: LifetimeSpec) -> SensitivityVector:
    return sensitivity_vector(params, spec)


def _h_weights(params: ProcessParams, criterion: Criterion):
    """(h1^2, h2^2) for the V criterion; (1, 1) for A."""
    if criterion.kind == "A":
        return 1.0, 1.0
    sv = _h_cached(params, criterion.lifetime)
    return sv.h1**2, sv.h2**2


def _v_ratio(params: ProcessParams, criterion: Criterion) -> float:
    """h2^2/(alpha*h1)^2 for V; its A-criterion analogue 1/alpha^2."""
    if criterion.kind == "A":
        return 1.0 / params.alpha**2
    return _h_cached(params, criterion.lifetime).ratio(params.alpha)


def _interval_info(params: ProcessParams, design: Design) -> float:
    """sum_j dt_j^2*psi1(alpha*dt_j) - T/alpha, accumulated stably."""
    a = params.alpha
    s = design.schedule
    if isinstance(s, Periodic):
        return design.m * (s.tau / a) * info_slack(a * s.tau)
    if isinstance(s, Aperiodic):
        dts = np.asarray(s.intervals)
        return float(np.sum((dts / a) * info_slack(a * dts)))
    u = s.T - (design.m - 1.0) * s.dt
    return ((design.m - 1.0) * (s.dt / a) * info_slack(a * s.dt)) + (u / a) * info_slack(a * u)


def fisher_information(params: ProcessParams, design: Design) -> np.ndarray:
    """2x2 diagonal Fisher information of (alpha, gamma) for the design."""
    g = _interval_info(params, design)
    if g <= 0.0 or not math.isfinite(g):
        raise NumericError(f"information surplus is non-positive ({g}); numeric fault")
    return np.array([[design.n * g, 0.0], [0.0, design.n * params.alpha * design.T]])


def objective(params: ProcessParams, criterion: Criterion, design: Design) -> float:
    """phi_D, phi_A or phi_V of the design. Strictly positive."""
    g = _interval_info(params, design)
    if g <= 0.0 or not math.isfinite(g):
        raise NumericError(f"information surplus is non-positive ({g}); numeric fault")
    n, T, a = design.n, design.T, params.alpha
    if criterion.kind == "D":
        return 1.0 / (n * n * g * a * T)
    w1, w2 = _h_weights(params, criterion)
    return w1 / (n * g) + w2 / (n * a * T)


def phi_tau(params: ProcessParams, criterion: Criterion, tau):
    """Analytic log-derivative of the periodic objective in tau.

    phi_D = (1/2) d/dtau log(alpha*tau^3*psi1(alpha*tau) - tau^2);
    phi_A, phi_V = -d/dtau log(bracketed objective sum). Broadcasts.
    """
    t = np.asarray(tau, dtype=float)
    if np.any(~np.isfinite(t)) or np.any(t <= 0.0):
        raise DomainError("tau must be finite and > 0")
    x = params.alpha * t
    slack = np.asarray(info_slack(x))
    if criterion.kind == "D":
        val = (np.asarray(info_slack_deriv(x)) + slack) / (2.0 * t * slack)
    else:
        r = _v_ratio(params, criterion)
        om = np.asarray(info_slack_deriv(x)) / (slack * slack)
        val = (om + r) * slack / (t * (1.0 + r * slack))
    return float(val) if np.isscalar(tau) else val


def k1(cost: CostModel, tau):
    """Boundary function of the single-unit (n = 1) stationarity case."""
    return 1.0 / (cost.c_mea / cost.c_op + np.asarray(tau, dtype=float))


def k2(cost: CostModel, tau):
    """Boundary function of the single-inspection (m = 1) case."""
    return 1.0 / (1.0 / cost.c_op - np.asarray(tau, dtype=float))


def k3(cost: CostModel, tau):
    """Boundary function of the fully interior case."""
    t = np.asarray(tau, dtype=float)
    return 1.0 / (t * np.sqrt(1.0 + cost.c_mea / (cost.c_op * cost.c_it * t)))


def cost_indices(cost: CostModel) -> tuple:
    """The two case-switch points and tau_max, in increasing order.

    Only defined when 1 - 2*c_it - c_mea > 0; otherwise the n = 1 cases
    are the whole story and there is no piecewise switch.
    """
    if 1.0 - 2.0 * cost.c_it - cost.c_mea <= 0.0:
        raise DomainError(
            "cost indices undefined: 1 - 2*c_it - c_mea <= 0 (single-unit regime)"
        )
    i1 = cost.c_it * cost.c_mea / (cost.c_op * (1.0 - 2.0 * cost.c_it))
    i2 = cost.c_it / (cost.c_op * (cost.c_mea + 2.0 * cost.c_it))
    return i1, i2, cost.tau_max


@dataclass(frozen=True)
class KBoundaries:
    k1: float
    k2: float
    k3: float
    k: float
    region: str  # "K1", "K3" or "K2"


def k_boundaries(cost: CostModel, tau: float) -> KBoundaries:
    """All three boundary functions plus the piecewise K(tau) at one point."""
    i1, i2, i3 = cost_indices(cost)
    if not (0.0 < tau <= i3):
        raise DomainError(f"tau must lie in (0, {i3:g}], got {tau}")
    v1, v2, v3 = float(k1(cost, tau)), float(k2(cost, tau)), float(k3(cost, tau))
    if tau <= i1:
        return KBoundaries(v1, v2, v3, v1, "K1")
    if tau <= i2:
        return KBoundaries(v1, v2, v3, v3, "K3")
    return KBoundaries(v1, v2, v3, v2, "K2")


def _front_loaded_parts(params: ProcessParams, m, T, dt):
    """Common pieces for the front-loaded schedule, broadcast over m and T.

    Returns (g, slack_dt, u, y) where g = alpha^2 * (interval info surplus)
    = (m-1)*x*slack(x) + y*slack(y), x = alpha*dt, y = alpha*u.
    """
    a = params.alpha
    m = np.asarray(m, dtype=float)
    T = np.asarray(T, dtype=float)
    u = T - (m - 1.0) * dt
    if np.any(m < 1.0 - 1e-12) or np.any(u < dt * (1.0 - 1e-9)):
        raise InfeasibleError("front-loaded schedule needs m >= 1 and T >= m*dt")
    x = a * dt
    y = a * u
    g = (m - 1.0) * x * info_slack(x) + y * np.asarray(info_slack(y))
    return g, x, u, y


def varrho_type2(params: ProcessParams, criterion: Criterion, m, T, dt: float):
    """The front-loaded schedule's information functional varrho(m, T).

    phi_D(design) = 1/(n^2*varrho_D) and phi_{A,V} = 1/(n*varrho_{A,V}).
    Broadcasts over m and T.
    """
    g, _, _, _ = _front_loaded_parts(params, m, T, dt)
    a = params.alpha
    T = np.asarray(T, dtype=float)
    G = g / (a * a)
    if criterion.kind == "D":
        out = a * T * G
    else:
        w1, w2 = _h_weights(params, criterion)
        out = 1.0 / (w1 / G + w2 / (a * T))
    return float(out) if np.isscalar(m) and np.isscalar(T) else out


def phi_m_phi_T(params: ProcessParams, criterion: Criterion, m, T, dt: float):
    """Partial log-derivatives of varrho in m and T (with the D half-factor).

    phi_m = c * d(log varrho)/dm, phi_T = c * d(log varrho)/dT, where
    c = 1/2 for D and 1 for A/V, matching the exponents in the objective.
    """
    g, x, _, y = _front_loaded_parts(params, m, T, dt)
    a = params.alpha
    T = np.asarray(T, dtype=float)
    ny = np.asarray(info_slack_deriv(y))
    # d g / dm = x*(slack(x) - deriv-slack(y)); d g / dT = alpha*(ny + 1)
    g_m = x * (info_slack(x) - ny)
    if criterion.kind == "D":
        # varrho_D = T*g/alpha: log-deriv in m is g_m/g; in T, 1/T + alpha*ny/g
        phim = 0.5 * g_m / g
        phit = 0.5 * (1.0 / T + a * ny / g)
    else:
        w1, w2 = _h_weights(params, criterion)
        G = g / (a * a)
        H = w1 / G + w2 / (a * T)
        phim = (w1 * (g_m / (a * a)) / (G * G)) / H
        phit = (w1 * (ny / a) / (G * G) + w2 / (a * T * T)) / H
    if np.isscalar(m) and np.isscalar(T):
        return float(phim), float(phit)
    return phim, phit
