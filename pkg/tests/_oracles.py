"""Shared test oracles: vectorized objective evaluation over many designs
and samplers for random budget-exhausting designs."""

import numpy as np

from gammadt.criteria import CostModel, Criterion
from gammadt.lifetime import ProcessParams, sensitivity_vector
from gammadt.specfun import info_slack


def weights(params: ProcessParams, criterion: Criterion):
    if criterion.kind == "A":
        return 1.0, 1.0
    sv = sensitivity_vector(params, criterion.lifetime)
    return sv.h1**2, sv.h2**2


def phi_periodic(params, criterion, n, m, tau):
    """Objective of periodic designs, vectorized over (n, m, tau)."""
    a = params.alpha
    n, m, tau = np.asarray(n, float), np.asarray(m, float), np.asarray(tau, float)
    g = m * (tau / a) * info_slack(a * tau)
    T = m * tau
    if criterion.kind == "D":
        return 1.0 / (n * n * g * a * T)
    w1, w2 = weights(params, criterion)
    return w1 / (n * g) + w2 / (n * a * T)


def phi_front_loaded(params, criterion, n, m, T, dt):
    """Objective of front-loaded designs, vectorized over (n, m, T)."""
    a = params.alpha
    n, m, T = np.asarray(n, float), np.asarray(m, float), np.asarray(T, float)
    u = T - (m - 1.0) * dt
    g = (m - 1.0) * (dt / a) * info_slack(a * dt) + (u / a) * info_slack(a * u)
    if criterion.kind == "D":
        return 1.0 / (n * n * g * a * T)
    w1, w2 = weights(params, criterion)
    return w1 / (n * g) + w2 / (n * a * T)


def sample_periodic(cost: CostModel, rng, size):
    """Budget-exhausting periodic designs: tau then m uniform on the log
    of their feasible ranges, n taking up the remaining budget."""
    dt, hi = cost.min_interval, cost.tau_max
    tau = np.exp(rng.uniform(np.log(dt), np.log(hi * 0.999999), size))
    m_hi = (1.0 - cost.c_it) / (cost.c_mea + cost.c_op * tau)
    m = np.exp(rng.uniform(0.0, np.log(np.maximum(m_hi, 1.0 + 1e-12)), size))
    n = (1.0 - cost.c_op * m * tau) / (cost.c_it + cost.c_mea * m)
    keep = (n >= 1.0) & (m >= 1.0)
    return n[keep], m[keep], tau[keep]


def sample_front_loaded(cost: CostModel, rng, size):
    """Budget-exhausting front-loaded designs with T >= m*dt."""
    dt = cost.min_interval
    m_hi = (1.0 - cost.c_it) / (cost.c_mea + cost.c_op * dt)
    m = np.exp(rng.uniform(0.0, np.log(max(m_hi * 0.999999, 1.0 + 1e-12)), size))
    n_hi = (1.0 - cost.c_op * m * dt) / (cost.c_it + cost.c_mea * m)
    n = 1.0 + rng.uniform(0.0, 1.0, size) * np.maximum(n_hi - 1.0, 0.0)
    T = (1.0 - cost.c_it * n - cost.c_mea * n * m) / cost.c_op
    keep = (n >= 1.0) & (T >= m * dt)
    return n[keep], m[keep], T[keep]
