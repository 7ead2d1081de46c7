import math

import numpy as np
import pytest

from _oracles import phi_periodic, sample_periodic
from gammadt.criteria import CostModel, Criterion, Design, Periodic, cost_indices, objective, phi_tau
from gammadt.errors import DomainError, InfeasibleError
from gammadt.lifetime import LifetimeSpec, ProcessParams
from gammadt.plan_type1 import (
    optimal_cost_constrained,
    optimal_tau_fixed_nT,
    optimal_tau_fixed_nm,
)

EX1 = ProcessParams(alpha=0.065, gamma=-0.77)
EX1_COST = CostModel(c_it=3e-2, c_mea=1.9e-3, c_op=2.7e-3, min_interval=5.0)
EX1_V = Criterion("V", LifetimeSpec(eta=0.5, p=0.1))
RESISTOR = ProcessParams(alpha=2.26e-4, gamma=-11.12)
RESISTOR_V = Criterion("V", LifetimeSpec(eta=5.0, p=0.05))


class TestFixedNM:
    def test_led_interior_optimum(self):
        res = optimal_tau_fixed_nm(EX1, EX1_V, n=1, m=1, dt=5.0)
        assert res.case_label == "interior"
        assert res.design.schedule.tau == pytest.approx(53.2, abs=0.5)

    def test_resistor_no_interior_optimum(self):
        res = optimal_tau_fixed_nm(RESISTOR, RESISTOR_V, n=1, m=1, dt=5.0)
        assert res.case_label == "no-interior-optimum"
        assert res.design is None

    def test_no_interior_with_tau_max(self):
        res = optimal_tau_fixed_nm(RESISTOR, RESISTOR_V, n=2, m=3, dt=5.0, tau_max=500.0)
        assert res.case_label == "no-interior-optimum"
        assert res.design.schedule.tau == 500.0
        assert res.objective_value == pytest.approx(
            objective(RESISTOR, RESISTOR_V, res.design), rel=1e-12
        )

    def test_D_has_no_interior_optimum(self):
        res = optimal_tau_fixed_nm(EX1, Criterion("D"), n=1, m=1, dt=5.0)
        assert res.case_label == "no-interior-optimum"

    def test_A_matches_unit_h_V(self):
        # A-optimality is the V rule with h1 = h2: interior point at
        # omega_inverse(-1/alpha^2)/alpha when 1/alpha^2 < 2/3
        big_alpha = ProcessParams(alpha=2.0, gamma=0.0)
        res = optimal_tau_fixed_nm(big_alpha, Criterion("A"), n=1, m=1, dt=1e-3)
        from gammadt.specfun import omega_inverse

        assert res.design.schedule.tau == pytest.approx(
            omega_inverse(-1.0 / 4.0) / 2.0, rel=1e-9
        )

    def test_dense_grid_oracle(self):
        res = optimal_tau_fixed_nm(EX1, EX1_V, n=1, m=1, dt=5.0)
        taus = np.geomspace(5.0, 5000.0, 10_000)
        vals = phi_periodic(EX1, EX1_V, 1.0, 1.0, taus)
        assert taus[np.argmin(vals)] == pytest.approx(res.design.schedule.tau, rel=1e-3)

    def test_min_interval_clamp(self):
        res = optimal_tau_fixed_nm(EX1, EX1_V, n=1, m=1, dt=100.0)
        assert res.case_label == "min-interval"
        assert res.design.schedule.tau == 100.0


class TestFixedNT:
    def test_always_min_interval(self):
        res = optimal_tau_fixed_nT(EX1, n=4.0, T=220.0, dt=5.0, criterion=Criterion("A"))
        assert res.design.schedule.tau == 5.0
        assert res.design.m == pytest.approx(44.0)

    def test_beats_random_feasible_intervals(self):
        rng = np.random.default_rng(8)
        T, n = 300.0, 2.0
        res = optimal_tau_fixed_nT(EX1, n=n, T=T, dt=5.0, criterion=Criterion("A"))
        for tau in np.exp(rng.uniform(np.log(5.0), np.log(T), 100)):
            challenger = phi_periodic(EX1, Criterion("A"), n, T / tau, tau)
            assert res.objective_value <= challenger * (1.0 + 1e-12)

    def test_degenerate_single_inspection(self):
        res = optimal_tau_fixed_nT(EX1, n=3.0, T=5.0, dt=5.0)
        assert res.design.m == pytest.approx(1.0)

    def test_infeasible(self):
        with pytest.raises(InfeasibleError):
            optimal_tau_fixed_nT(EX1, n=1.0, T=2.0, dt=5.0)


class TestCostConstrained:
    @pytest.mark.parametrize(
        "crit,case,n,m,T,phi",
        [
            (Criterion("D"), 7, 9.85, 21.9, 109.4, 3.53e-7),
            (Criterion("A"), 3, 16.0, 1.24, 178.2, 5.79e-3),
            (EX1_V, 3, 10.2, 19.9, 113.7, 2.47e-3),
        ],
    )
    def test_example1_rows(self, crit, case, n, m, T, phi):
        res = optimal_cost_constrained(EX1, crit, EX1_COST)
        assert res.case_label == case
        assert res.selected_by == "sufficient-conditions"
        assert res.design.n == pytest.approx(n, rel=0.02)
        assert res.design.m == pytest.approx(m, rel=0.02)
        assert res.design.T == pytest.approx(T, rel=0.02)
        assert res.objective_value == pytest.approx(phi, rel=0.01)

    def test_constraint_satisfaction(self):
        for crit in (Criterion("D"), Criterion("A"), EX1_V):
            res = optimal_cost_constrained(EX1, crit, EX1_COST)
            d = res.design
            assert abs(EX1_COST.total(d.n, d.m, d.T) - 1.0) <= 1e-9
            assert d.schedule.tau >= EX1_COST.min_interval - 1e-12
            assert d.n >= 1.0 - 1e-12 and d.m >= 1.0 - 1e-12
            assert res.objective_value == pytest.approx(objective(EX1, crit, d), rel=1e-10)

    def test_degenerate_budget_case8(self):
        cost = CostModel(c_it=0.5, c_mea=0.3, c_op=0.04, min_interval=5.0)
        res = optimal_cost_constrained(EX1, Criterion("D"), cost)
        assert res.case_label == 8
        assert res.design.n == 1.0 and res.design.m == 1.0
        assert res.design.schedule.tau == 5.0

    def test_dominance_small(self):
        rng = np.random.default_rng(31)
        for crit in (Criterion("D"), EX1_V):
            res = optimal_cost_constrained(EX1, crit, EX1_COST)
            n, m, tau = sample_periodic(EX1_COST, rng, 2000)
            vals = phi_periodic(EX1, crit, n, m, tau)
            assert res.objective_value <= float(np.min(vals)) * (1.0 + 1e-9)

    def test_case_boundary_case2_meets_case3(self):
        # tune c_op so the stationarity root lands exactly on the switch
        # index between the interior and single-inspection cases; the two
        # constructions must then coincide.
        from scipy.optimize import brentq

        cit, cmea = 0.05, 0.01
        params = ProcessParams(alpha=0.3, gamma=0.0)
        crit = Criterion("A")

        def gap(cop):
            cost = CostModel(cit, cmea, cop, min_interval=1e-3)
            _, i2, _ = cost_indices(cost)
            from gammadt.criteria import k2

            return float(phi_tau(params, crit, i2) - k2(cost, i2))

        cop_star = brentq(gap, 1e-4, 0.5, rtol=1e-14)
        cost = CostModel(cit, cmea, cop_star, min_interval=1e-3)
        _, i2, _ = cost_indices(cost)
        n2 = (1.0 - cost.c_op * i2) / (cit + cmea)
        q = cmea * cit / (cost.c_op * i2)
        s = math.sqrt(cit**2 + q)
        n3, m3 = (s - cit) / q, (s - cit) / cmea
        assert m3 == pytest.approx(1.0, abs=1e-9)
        assert n3 == pytest.approx(n2, rel=1e-9)
        o2 = objective(params, crit, Design(n2, 1.0, Periodic(i2)))
        o3 = objective(params, crit, Design(n3, max(m3, 1.0), Periodic(i2)))
        assert o2 == pytest.approx(o3, rel=1e-8)

    @pytest.mark.parametrize("crit", [Criterion("D"), Criterion("A"), EX1_V])
    def test_interior_kkt_residuals(self, crit):
        res = optimal_cost_constrained(EX1, crit, EX1_COST)
        if res.case_label not in (1, 2, 3):
            pytest.skip("optimum is a boundary case here")
        d = res.design
        n, m, tau = d.n, d.m, d.schedule.tau
        k = 2.0 if crit.kind == "D" else 1.0
        lam = k * phi_tau(EX1, crit, tau) / (EX1_COST.c_op * m)
        r1 = k / n - lam * (EX1_COST.c_it + EX1_COST.c_mea * m)
        r2 = k / m - lam * (EX1_COST.c_mea * n + EX1_COST.c_op * tau)
        if res.case_label == 3:
            assert abs(r1) < 1e-8 and abs(r2) < 1e-8
        elif res.case_label == 1:  # n pinned at 1: only the m equation holds
            assert abs(r2) < 1e-8
        else:  # m pinned at 1: only the n equation holds
            assert abs(r1) < 1e-8

    def test_zero_mea_rejected(self):
        with pytest.raises(DomainError):
            optimal_cost_constrained(EX1, Criterion("D"), CostModel(0.1, 0.0, 0.01, 1.0))

    def test_diagnostics_cover_all_cases(self):
        res = optimal_cost_constrained(EX1, Criterion("D"), EX1_COST)
        cases = {c.case for c in res.diagnostics}
        assert {4, 5, 6, 7, 8} <= cases
