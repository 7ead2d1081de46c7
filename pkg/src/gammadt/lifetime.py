"""Gamma-process degradation model and the first-passage lifetime it induces.

The process Z(t) has independent stationary increments with
Z(t) ~ Gam(alpha*t, beta) in the shape/rate convention. Parameters are
carried in the drift form (alpha, gamma) with beta = alpha*exp(-gamma), so
the mean path is E[Z(t)] = exp(gamma)*t and the two MLEs are asymptotically
independent.

Lifetime is the first time the (monotone) path reaches a threshold eta:
F_Q(t) = P(Z(t) >= eta). The quantile xi_p and its parameter gradient
(h1, h2) = d(xi_p)/d(alpha, gamma) feed the variance-of-quantile design
criterion. The shape-parameter derivative of the regularized incomplete
gamma has no workable closed form, so the gradient uses central differences
with one Richardson extrapolation level, validated elsewhere against direct
differentiation of the quantile itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .errors import BracketError, DomainError, InstabilityError
from .specfun import reg_lower_gamma

__all__ = [
    "ProcessParams",
    "LifetimeSpec",
    "SensitivityVector",
    "degradation_cdf",
    "lifetime_cdf",
    "lifetime_quantile",
    "sensitivity_vector",
    "choose_min_interval",
]

_BRENT_RTOL = 8.9e-16
_FD_REL_STEP = 1e-5


@dataclass(frozen=True)
class ProcessParams:
    """Gamma-process parameters: shape rate ``alpha`` and log drift ``gamma``."""

    alpha: float
    gamma: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0.0):
            raise DomainError(f"alpha must be finite and > 0, got {self.alpha}")
        if not math.isfinite(self.gamma):
            raise DomainError(f"gamma must be finite, got {self.gamma}")

    @property
    def beta(self) -> float:
        """Rate parameter of the increment distribution, alpha*exp(-gamma)."""
        return self.alpha * math.exp(-self.gamma)

    @property
    def drift(self) -> float:
        """Mean degradation per unit time, exp(gamma)."""
        return math.exp(self.gamma)


@dataclass(frozen=True)
class LifetimeSpec:
    """Failure threshold ``eta`` and quantile level ``p`` of interest."""

    eta: float
    p: float

    def __post_init__(self):
        if not (math.isfinite(self.eta) and self.eta > 0.0):
            raise DomainError(f"eta must be finite and > 0, got {self.eta}")
        if not (0.0 < self.p < 1.0):
            raise DomainError(f"p must lie in (0, 1), got {self.p}")


@dataclass(frozen=True)
class SensitivityVector:
    """Gradient of the lifetime quantile: h1 = dxi/dalpha, h2 = dxi/dgamma."""

    h1: float
    h2: float

    def ratio(self, alpha: float) -> float:
        """h2^2 / (alpha*h1)^2 -- decides whether an interior optimal
        inspection interval exists (threshold 2/3)."""
        return self.h2**2 / (alpha * self.h1) ** 2


def degradation_cdf(params: ProcessParams, t: float, z: float) -> float:
    """P(Z(t) <= z) for the gamma process."""
    if not (math.isfinite(t) and t > 0.0):
        raise DomainError(f"t must be > 0, got {t}")
    if not (math.isfinite(z) and z >= 0.0):
        raise DomainError(f"z must be >= 0, got {z}")
    return reg_lower_gamma(params.alpha * t, params.beta * z)


def lifetime_cdf(params: ProcessParams, spec: LifetimeSpec, t: float) -> float:
    """F_Q(t) = P(first passage of eta <= t) = P(Z(t) >= eta)."""
    return 1.0 - degradation_cdf(params, t, spec.eta)


def _bracket_increasing(f, t0, lo_target, hi_target, max_doublings=400):
    """Expand [lo, hi] from t0 until f(lo) <= lo_target and f(hi) >= hi_target."""
    lo = hi = t0
    for _ in range(max_doublings):
        if f(lo) <= lo_target:
            break
        lo /= 2.0
    else:
        raise BracketError("no lower bracket: CDF numerically flat near 0")
    for _ in range(max_doublings):
        if f(hi) >= hi_target:
            break
        hi *= 2.0
    else:
        raise BracketError("no upper bracket: CDF numerically flat near 1")
    return lo, hi


def lifetime_quantile(params: ProcessParams, spec: LifetimeSpec) -> float:
    """xi_p, the p-th quantile of the first-passage lifetime.

    Bracketing starts at the mean-crossing time eta*exp(-gamma) and expands
    geometrically; the mean crossing always sits within a few factors of any
    moderate quantile.
    """
    f = lambda t: lifetime_cdf(params, spec, t)
    t0 = spec.eta / params.drift
    lo, hi = _bracket_increasing(f, t0, spec.p, spec.p)
    if lo == hi:
        return lo
    return brentq(lambda t: f(t) - spec.p, lo, hi, xtol=1e-300, rtol=_BRENT_RTOL)


def _richardson(f, x, h):
    d1 = (f(x + h) - f(x - h)) / (2.0 * h)
    d2 = (f(x + h / 2.0) - f(x - h / 2.0)) / h
    return (4.0 * d2 - d1) / 3.0


def sensitivity_vector(params: ProcessParams, spec: LifetimeSpec) -> SensitivityVector:
    """(h1, h2) = d(xi_p)/d(alpha, gamma) via the implicit-function rule
    h = -(dF_Q/dtheta) / f_Q evaluated at t = xi_p."""
    xi = lifetime_quantile(params, spec)

    def cdf_at(alpha, gamma, t):
        return 1.0 - reg_lower_gamma(alpha * t, alpha * math.exp(-gamma) * spec.eta)

    a, g = params.alpha, params.gamma
    dF_da = _richardson(lambda v: cdf_at(v, g, xi), a, _FD_REL_STEP * a)
    dF_dg = _richardson(lambda v: cdf_at(a, v, xi), g, _FD_REL_STEP * max(abs(g), 1.0))
    f_q = _richardson(lambda v: cdf_at(a, g, v), xi, _FD_REL_STEP * xi)
    if not (math.isfinite(f_q)) or f_q < 1e-300:
        raise InstabilityError(f"lifetime density underflows at xi_p={xi:g}; h is undefined")
    return SensitivityVector(h1=-dF_da / f_q, h2=-dF_dg / f_q)


def choose_min_interval(params: ProcessParams, a: float, b: float) -> float:
    """Smallest usable inspection interval: the dt with P(Z(dt) > a) = b.

    ``a`` is the tool-resolution threshold, ``b`` the required probability of
    seeing a measurable increment.
    """
    if not (math.isfinite(a) and a > 0.0):
        raise DomainError(f"threshold a must be > 0, got {a}")
    if not (0.0 < b < 1.0):
        raise DomainError(f"probability b must lie in (0, 1), got {b}")
    f = lambda t: 1.0 - reg_lower_gamma(params.alpha * t, params.beta * a)
    t0 = a / params.drift
    lo, hi = _bracket_increasing(f, t0, b, b)
    if lo == hi:
        return lo
    return brentq(lambda t: f(t) - b, lo, hi, xtol=1e-300, rtol=_BRENT_RTOL)
