import math
import random

import numpy as np
import pytest

from deadcore.balance import lem_worstcase_spec, select_profile, thickness
from deadcore.errors import (
    BracketError,
    DegenerateGradient,
    InvalidInput,
    NoDeadCore,
    Overflow,
)
from deadcore.model import HamiltonianKind, ModelSpec, NonlinearityKind
from deadcore.radial import (
    integrate_ivp,
    measure_deadcore,
    richardson_error,
    shoot_bvp,
    write_solution_csv,
)
from specgen import random_absorption_spec, random_two_term_spec

GP = HamiltonianKind.GRADIENT_POWER
TAU_CLASSIC = (81.0 / 64.0) ** (1.0 / 3.0)
T_CLASSIC = 2.0 * math.sqrt(2.0) / 3.0


class TestIntegrateIvp:
    def test_normalized_analytic_case(self):
        sol = integrate_ivp(ModelSpec(beta=2.0), 1.0, 256)
        assert sol.h_vals[-1] == pytest.approx(0.5, rel=1e-8)
        exact = sol.s_grid**2 / 2.0
        np.testing.assert_allclose(sol.h_vals, exact, rtol=1e-8, atol=1e-14)

    def test_classic_analytic_case(self):
        sol = integrate_ivp(ModelSpec(), 1.0, 512)
        exact = TAU_CLASSIC * sol.s_grid ** (4.0 / 3.0)
        mask = sol.s_grid >= 0.1
        rel = np.abs(sol.h_vals[mask] - exact[mask]) / exact[mask]
        assert np.max(rel) <= 1e-6

    def test_zero_forcing_stays_zero(self):
        spec = ModelSpec().with_(lam=0.0)
        sol = integrate_ivp(spec, 1.0, 64, seed=(0.0, 0.0))
        assert np.all(sol.h_vals == 0.0)
        assert sol.measured_T is None

    def test_monotone_profile(self):
        rng = random.Random(23)
        for _ in range(10):
            spec = random_two_term_spec(rng)
            sol = integrate_ivp(spec, thickness(spec), 128)
            assert np.all(np.diff(sol.h_vals) >= 0.0)
            assert np.all(sol.hp_vals >= 0.0)
            assert sol.h_vals[0] == 0.0 and sol.hp_vals[0] == 0.0

    def test_fourth_order_convergence(self):
        for spec, s_end, exact_fn in (
            (ModelSpec(), T_CLASSIC, lambda s: TAU_CLASSIC * s ** (4.0 / 3.0)),
            (ModelSpec(beta=2.0), 1.0, lambda s: s**2 / 2.0),
        ):
            errs = []
            for steps in (64, 128):
                sol = integrate_ivp(spec, s_end, steps)
                mask = sol.s_grid >= s_end / 4.0
                errs.append(np.max(np.abs(sol.h_vals[mask] - exact_fn(sol.s_grid[mask]))))
            assert errs[1] <= errs[0] / 8.0 + 1e-14

    def test_measured_thickness(self):
        sol = integrate_ivp(ModelSpec(), 1.2 * T_CLASSIC, 512)
        assert sol.measured_T == pytest.approx(T_CLASSIC, rel=1e-6)

    def test_degenerate_gradient_error(self):
        with pytest.raises(DegenerateGradient):
            integrate_ivp(ModelSpec(), 1.0, 64, seed=(1.0, 0.0))

    def test_overflow_guard(self):
        spec = ModelSpec(beta=0.0, m=1.0, c=1.0, lam=5.0, gamma=0.0, alpha=-0.5,
                         hamiltonian=GP, nonlinearity=NonlinearityKind.EXPONENTIAL)
        with pytest.raises(Overflow):
            integrate_ivp(spec, 40.0, 4096, seed=(1.0, 1.0))

    def test_validation(self):
        with pytest.raises(InvalidInput):
            integrate_ivp(ModelSpec(), 1.0, 8)
        with pytest.raises(InvalidInput):
            integrate_ivp(ModelSpec(), -1.0, 64)
        with pytest.raises(InvalidInput):
            integrate_ivp(ModelSpec(), 1.0, 64, seed=(-1.0, 0.0))

    def test_discrete_residual_reported(self):
        sol = integrate_ivp(ModelSpec(), T_CLASSIC, 256)
        res = sol.discrete_residuals()
        # central-difference residual is second order in the step
        assert res.size == sol.s_grid.size - 2
        assert np.max(res[sol.s_grid[1:-1] > 0.2]) <= 1e-3

    def test_richardson_estimate(self):
        est = richardson_error(ModelSpec(), T_CLASSIC, 128)
        assert 0.0 <= est <= 1e-8

    def test_csv_export(self, tmp_path):
        sol = integrate_ivp(ModelSpec(), 0.5, 64)
        path = tmp_path / "sol.csv"
        write_solution_csv(sol, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "s,h,hp,residual"
        assert len(lines) == 66


class TestShootBvp:
    def test_classic_thickness(self):
        T, sol = shoot_bvp(ModelSpec(), 1.0, (0.4, 1.5))
        assert T == pytest.approx(T_CLASSIC, rel=1e-4)
        assert sol.h_vals[-1] == pytest.approx(1.0, rel=1e-7)

    def test_normalized_thickness(self):
        # h = s^2/2 crosses d = 1 at s = sqrt(2)
        T, _ = shoot_bvp(ModelSpec(beta=2.0), 1.0, (0.5, 3.0))
        assert T == pytest.approx(math.sqrt(2.0), rel=1e-6)

    def test_small_datum_limit(self):
        specs = ModelSpec()
        T2, _ = shoot_bvp(specs, 1e-2, (1e-3, 1.0))
        T4, _ = shoot_bvp(specs, 1e-4, (1e-4, 1.0))
        assert T4 < T2 < T_CLASSIC
        assert T2 == pytest.approx((1e-2 / TAU_CLASSIC) ** 0.75, rel=1e-4)

    def test_bracket_errors(self):
        with pytest.raises(BracketError):
            shoot_bvp(ModelSpec(), 1.0, (1.5, 2.0))  # lo already exceeds the datum
        with pytest.raises(BracketError):
            shoot_bvp(ModelSpec(), 1.0, (0.1, 0.5))  # hi falls below the datum
        with pytest.raises(InvalidInput):
            shoot_bvp(ModelSpec(), 1.0, (1.0, 0.5))

    def test_datum_scaling_law(self):
        T1, _ = shoot_bvp(ModelSpec(), 1.0, (0.4, 1.5))
        T2, _ = shoot_bvp(ModelSpec(), 2.0, (0.4, 3.0))
        assert T2 / T1 == pytest.approx(2.0 ** 0.75, rel=1e-4)

    def test_lem_worstcase_matches_implicit_thickness(self):
        spec = ModelSpec(alpha=1.0, nonlinearity=NonlinearityKind.LANE_EMDEN_MATUKUMA)
        T_implicit = thickness(spec)
        wc = lem_worstcase_spec(spec, T_implicit)
        T_shot, _ = shoot_bvp(wc, 1.0, (0.5 * T_implicit, 1.5 * T_implicit))
        assert T_shot == pytest.approx(T_implicit, rel=1e-4)


class TestMeasureDeadcore:
    def test_exact_balance_case(self):
        R = 2.0 * T_CLASSIC
        rho, cmp = measure_deadcore(ModelSpec(), R)
        assert rho == pytest.approx(R - T_CLASSIC, abs=1e-4)
        assert cmp.max_abs_rel_dev <= 1e-4

    def test_plateau_identically_zero(self):
        R = 2.0 * T_CLASSIC
        rho, cmp = measure_deadcore(ModelSpec(), R)
        plateau_radii = np.linspace(0.0, 0.999 * rho, 64)
        assert np.max(np.abs(cmp.evaluate_embedded(plateau_radii))) == 0.0

    def test_two_term_one_sided(self):
        spec = ModelSpec(gamma=0.5, m=2.0, c=1.0, hamiltonian=GP)
        R = 2.0 * thickness(spec)
        rho, cmp = measure_deadcore(spec, R)
        # the barrier is a supersolution: the shot solution stays below it
        assert cmp.max_signed_dev <= 1e-6
        assert cmp.T_found < cmp.profile.T
        assert rho > cmp.profile.rho

    def test_no_dead_core_passthrough(self):
        with pytest.raises(NoDeadCore):
            measure_deadcore(ModelSpec(), 0.5 * T_CLASSIC)

    def test_random_absorption_specs(self):
        rng = random.Random(29)
        for _ in range(5):
            spec = random_absorption_spec(rng)
            profile = select_profile(spec, 2.0 * thickness(spec))
            rho, cmp = measure_deadcore(spec, profile.R)
            assert cmp.T_found == pytest.approx(profile.T, rel=1e-4)
