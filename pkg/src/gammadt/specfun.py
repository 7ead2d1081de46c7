"""Special-function kernel: polygamma functions, log-gamma, the regularized
lower incomplete gamma function and its inverse, and the ratio function

    Omega(x) = (2*x*psi1(x) + x^2*psi2(x) - 1) / (x*psi1(x) - 1)^2,

which maps (0, inf) strictly decreasingly onto (-2/3, 0) and whose inverse
locates interior optima of inspection-interval objectives.

The polygammas use the classical recurrence shift to x >= 10 followed by the
asymptotic Bernoulli series (Abramowitz & Stegun 6.3.18/6.4.11-13); the
truncation at B_16 keeps the next-term bound below 1e-14 on the shifted
argument. The incomplete gamma follows the series / continued-fraction split
of Numerical Recipes ch. 6.2 with modified-Lentz evaluation.

All polygamma-style functions accept floats or numpy arrays and are pure;
``reg_lower_gamma`` and the root-finding inverses are scalar.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

from .errors import BracketError, DomainError, InstabilityError, NumericError

__all__ = [
    "digamma",
    "trigamma",
    "tetragamma",
    "log_gamma",
    "reg_lower_gamma",
    "inv_reg_lower_gamma",
    "omega",
    "omega_inverse",
    "info_slack",
    "info_slack_deriv",
]

# Bernoulli numbers B_2 .. B_16
_B2K = np.array([
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
])
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# smallest relative tolerance scipy's brentq accepts (4 * machine epsilon)
_BRENT_RTOL = 8.9e-16

# Direct evaluation of x*psi1(x)-1 and 2x*psi1(x)+x^2*psi2(x)-1 cancels
# catastrophically for large x; switch to their own Bernoulli expansions here.
_SLACK_SERIES_CUTOFF = 20.0

# omega() refuses arguments beyond this point (see module docstring of the
# planning modules: nothing upstream ever needs Omega out there, and a loud
# failure beats quiet precision loss in the inverse).
_OMEGA_MAX_X = 1.0e12


def _as_positive_array(x, name):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise DomainError(f"{name} requires finite x > 0, got {x!r}")
    return arr


def _maybe_scalar(result, x):
    if np.isscalar(x) or getattr(x, "ndim", 1) == 0:
        return float(result)
    return result


def _shift(arr, acc0, term, target=10.0):
    """Apply the polygamma recurrence until every element is >= target.

    ``term(x)`` is the increment removed at each unit step; returns the
    shifted argument and the accumulated correction.
    """
    x = arr.copy()
    acc = np.full_like(x, acc0)
    # arguments below target move up one unit per pass; at most ceil(target)
    for _ in range(int(target) + 1):
        mask = x < target
        if not mask.any():
            break
        acc[mask] += term(x[mask])
        x[mask] += 1.0
    return x, acc


def digamma(x):
    """psi0(x) = d log Gamma(x) / dx for x > 0."""
    arr = _as_positive_array(x, "digamma")
    xs, acc = _shift(arr, 0.0, lambda v: -1.0 / v)
    z = 1.0 / (xs * xs)
    tail = np.zeros_like(xs)
    for k in range(len(_B2K) - 1, -1, -1):
        tail = (tail + _B2K[k] / (2 * (k + 1))) * z
    val = np.log(xs) - 0.5 / xs - tail + acc
    return _maybe_scalar(val, x)


def trigamma(x):
    """psi1(x) = sum_{v>=0} 1/(x+v)^2 for x > 0."""
    arr = _as_positive_array(x, "trigamma")
    xs, acc = _shift(arr, 0.0, lambda v: 1.0 / (v * v))
    z = 1.0 / (xs * xs)
    tail = np.zeros_like(xs)
    for k in range(len(_B2K) - 1, -1, -1):
        tail = (tail + _B2K[k]) * z
    val = 1.0 / xs + 0.5 * z + tail / xs + acc
    return _maybe_scalar(val, x)


def tetragamma(x):
    """psi2(x) = -2 * sum_{v>=0} 1/(x+v)^3 for x > 0. Always negative."""
    arr = _as_positive_array(x, "tetragamma")
    xs, acc = _shift(arr, 0.0, lambda v: -2.0 / (v * v * v))
    z = 1.0 / (xs * xs)
    tail = np.zeros_like(xs)
    for k in range(len(_B2K) - 1, -1, -1):
        tail = (tail + (2 * k + 3) * _B2K[k]) * z
    val = -z - 1.0 / (xs * xs * xs) - tail * z + acc
    return _maybe_scalar(val, x)


def log_gamma(x):
    """log Gamma(x) for x > 0 via recurrence shift plus the Stirling series."""
    arr = _as_positive_array(x, "log_gamma")
    xs, acc = _shift(arr, 0.0, lambda v: -np.log(v))
    z = 1.0 / (xs * xs)
    tail = np.zeros_like(xs)
    for k in range(len(_B2K) - 1, -1, -1):
        tail = tail * z + _B2K[k] / ((2 * k + 2) * (2 * k + 1))
    val = (xs - 0.5) * np.log(xs) - xs + _HALF_LOG_2PI + tail / xs + acc
    return _maybe_scalar(val, x)


def info_slack(x):
    """x*psi1(x) - 1, evaluated without cancellation.

    Strictly positive on (0, inf) and ~ 1/(2x) as x -> inf; this is the
    per-interval Fisher-information surplus that every design objective is
    built from.
    """
    arr = _as_positive_array(x, "info_slack")
    small = arr < _SLACK_SERIES_CUTOFF
    out = np.empty_like(arr)
    if small.any():
        xs = arr[small]
        out[small] = xs * trigamma(xs) - 1.0
    if (~small).any():
        xl = arr[~small]
        z = 1.0 / (xl * xl)
        tail = np.zeros_like(xl)
        for k in range(len(_B2K) - 1, -1, -1):
            tail = tail * z + _B2K[k]
        out[~small] = 0.5 / xl + tail * z
    return _maybe_scalar(out, x)


def info_slack_deriv(x):
    """d/dx [x^2*psi1(x) - x] = 2x*psi1(x) + x^2*psi2(x) - 1, stably.

    Strictly negative on (0, inf), -> -1 as x -> 0+, -> 0- as x -> inf.
    """
    arr = _as_positive_array(x, "info_slack_deriv")
    small = arr < _SLACK_SERIES_CUTOFF
    out = np.empty_like(arr)
    if small.any():
        xs = arr[small]
        out[small] = 2.0 * xs * trigamma(xs) + xs * xs * tetragamma(xs) - 1.0
    if (~small).any():
        xl = arr[~small]
        z = 1.0 / (xl * xl)
        tail = np.zeros_like(xl)
        for k in range(len(_B2K) - 1, -1, -1):
            tail = tail * z + (2 * k + 1) * _B2K[k]
        out[~small] = -tail * z
    return _maybe_scalar(out, x)


def omega(x):
    """Omega(x) = (2x*psi1 + x^2*psi2 - 1) / (x*psi1 - 1)^2, in (-2/3, 0)."""
    arr = _as_positive_array(x, "omega")
    if np.any(arr > _OMEGA_MAX_X):
        raise InstabilityError(
            f"omega is not evaluated for x > {_OMEGA_MAX_X:g}; "
            "the denominator underflows all significance"
        )
    slack = np.asarray(info_slack(arr))
    val = np.asarray(info_slack_deriv(arr)) / (slack * slack)
    return _maybe_scalar(val, x)


def omega_inverse(y):
    """Unique x > 0 with omega(x) = y, for y in the open interval (-2/3, 0).

    Monotonicity of omega guarantees a bracket; the bracket is grown
    geometrically from [1e-8, 1] and then polished by Brent's method.
    """
    y = float(y)
    if not (-2.0 / 3.0 < y < 0.0):
        raise DomainError(f"omega_inverse requires -2/3 < y < 0, got {y}")
    lo, hi = 1e-8, 1.0
    while omega(lo) <= y:  # y extremely close to 0-
        lo /= 4.0
        if lo < 1e-120:
            raise BracketError("omega_inverse: no lower bracket found")
    while omega(hi) > y:
        hi *= 2.0
        if hi > _OMEGA_MAX_X:
            raise BracketError(
                f"omega_inverse: omega({hi/2:g}) is still above {y}; "
                "y is too close to -2/3 to resolve"
            )
    return brentq(lambda t: omega(t) - y, lo, hi, xtol=1e-300, rtol=_BRENT_RTOL)


def _log1p_minus(u):
    """log(1+u) - u without cancellation for small |u|."""
    if abs(u) > 0.3:
        return math.log1p(u) - u
    total = 0.0
    term = -u
    for k in range(2, 60):
        term *= -u
        total -= term / k
        if abs(term) < 1e-18 * (abs(total) + 1e-30):
            break
    return total


def _scaled_gamma_log(a, x):
    """log(x^a * e^-x / Gamma(a)), stable near the mode for large a."""
    if a < 50.0:
        return -x + a * math.log(x) - log_gamma(a)
    # Stirling form: a*(log(x/a)+1) - x - (log_gamma(a) - (a-1/2)log a + a - c)
    z = 1.0 / (a * a)
    tail = 0.0
    for k in range(len(_B2K) - 1, -1, -1):
        tail = tail * z + _B2K[k] / ((2 * k + 2) * (2 * k + 1))
    tail /= a
    d = x - a
    return a * _log1p_minus(d / a) + 0.5 * math.log(a) - _HALF_LOG_2PI - tail


def _reg_lower_series(a, x):
    term = 1.0 / a
    total = term
    # near x ~ a the term ratio is a/(a+n): convergence takes O(sqrt(a)) terms
    for n in range(1, 500 + int(45.0 * math.sqrt(a))):
        term *= x / (a + n)
        total += term
        if abs(term) < abs(total) * 1e-16:
            return total * math.exp(_scaled_gamma_log(a, x))
    raise NumericError(f"reg_lower_gamma series did not converge (a={a}, x={x})")


def _reg_upper_cf(a, x):
    # modified Lentz on the continued fraction for Q(a, x)
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b if b != 0.0 else 1.0 / tiny
    h = d
    for i in range(1, 500 + int(45.0 * math.sqrt(a))):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            return math.exp(_scaled_gamma_log(a, x)) * h
    raise NumericError(f"reg_lower_gamma continued fraction did not converge (a={a}, x={x})")


def reg_lower_gamma(a, x):
    """Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).

    Series representation for x < a + 1, continued fraction otherwise;
    absolute error below 1e-12 across the positive quadrant.
    """
    a = float(a)
    x = float(x)
    if not (math.isfinite(a) and a > 0.0):
        raise DomainError(f"reg_lower_gamma requires a > 0, got a={a}")
    if not (math.isfinite(x) and x >= 0.0):
        raise DomainError(f"reg_lower_gamma requires x >= 0, got x={x}")
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        return min(_reg_lower_series(a, x), 1.0)
    return max(0.0, min(1.0 - _reg_upper_cf(a, x), 1.0))


def inv_reg_lower_gamma(a, q):
    """x with reg_lower_gamma(a, x) = q, for q in (0, 1)."""
    a = float(a)
    q = float(q)
    if not (math.isfinite(a) and a > 0.0):
        raise DomainError(f"inv_reg_lower_gamma requires a > 0, got a={a}")
    if not (0.0 < q < 1.0):
        raise DomainError(f"inv_reg_lower_gamma requires 0 < q < 1, got q={q}")
    lo = hi = a  # the mean of Gam(a, 1) is a
    for _ in range(2000):
        if reg_lower_gamma(a, lo) <= q:
            break
        lo /= 2.0
    else:
        raise BracketError(f"inv_reg_lower_gamma: no lower bracket (a={a}, q={q})")
    for _ in range(2000):
        if reg_lower_gamma(a, hi) >= q:
            break
        hi *= 2.0
    else:
        raise BracketError(f"inv_reg_lower_gamma: no upper bracket (a={a}, q={q})")
    if lo == hi:
        return lo
    return brentq(lambda t: reg_lower_gamma(a, t) - q, lo, hi, xtol=1e-300, rtol=_BRENT_RTOL)
