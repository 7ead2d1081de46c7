"""Bracketed root finding on a sampling grid.

The planners never assume a stationarity equation has a unique root: the
residual is sampled on a dense grid, every sign change is polished with
Brent's method, and all roots become candidates.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import brentq

_BRENT_RTOL = 8.9e-16


def bracketed_roots(f, lo, hi, n=512, log_spacing=True, vectorized=False):
    """All roots of f on [lo, hi] found via n-point sign-change scanning.

    ``f`` may return NaN on parts of the range (treated as no bracket).
    With ``vectorized`` the grid is evaluated in one call.
    """
    if not (hi > lo > 0.0) and log_spacing:
        raise ValueError(f"log grid needs 0 < lo < hi, got [{lo}, {hi}]")
    grid = np.geomspace(lo, hi, n) if log_spacing else np.linspace(lo, hi, n)
    if vectorized:
        vals = np.asarray(f(grid), dtype=float)
    else:
        vals = np.array([f(g) for g in grid], dtype=float)
    roots = []
    for a, b, fa, fb in zip(grid, grid[1:], vals, vals[1:]):
        if not (np.isfinite(fa) and np.isfinite(fb)):
            continue
        if fa == 0.0:
            roots.append(float(a))
        elif fa * fb < 0.0:
            roots.append(float(brentq(f, a, b, xtol=1e-300, rtol=_BRENT_RTOL)))
    if len(vals) and vals[-1] == 0.0 and np.isfinite(vals[-1]):
        roots.append(float(grid[-1]))
    # de-duplicate roots that straddle grid points
    out = []
    for r in roots:
        if not out or abs(r - out[-1]) > 1e-9 * max(1.0, abs(r)):
            out.append(r)
    return out
