import math
import random

import numpy as np
import pytest

from deadcore.balance import select_profile, thickness
from deadcore.barrier import RadialBarrier, eval_barrier
from deadcore.errors import InvalidInput
from deadcore.grid import (
    DiscGrid,
    SolverOptions,
    grid_to_csv,
    lipschitz_estimate,
    rotation_invariance_check,
    scheme_value,
    solve,
)
from deadcore.model import HamiltonianKind, ModelSpec, NonlinearityKind

GP = HamiltonianKind.GRADIENT_POWER

# normalized-operator spec used by the comparison oracle: no degenerate factor
SPEC_BETA2 = ModelSpec(beta=2.0, gamma=0.5, m=0.5, c=1.0, hamiltonian=GP)
# pure absorption at beta = 2: the zero function is a discrete subsolution,
# so the unconstrained fixed point is nonnegative and oracle-comparable
SPEC_ABS2 = ModelSpec(beta=2.0, gamma=0.5)
# degenerate-operator spec with an absorption-dominant profile
SPEC_BETA0 = ModelSpec(beta=0.0, gamma=0.5, m=2.0, c=4.0, hamiltonian=GP)


def set_values(grid: DiscGrid, fn) -> None:
    grid.values[...] = fn(grid.X, grid.Y)


class TestDiscGrid:
    def test_masks_partition(self):
        grid = DiscGrid.from_resolution((0.0, 0.0), 1.0, 17)
        assert not np.any(grid.interior_mask & grid.dirichlet_mask)
        assert np.all(grid.radius[grid.interior_mask] <= 1.0 - grid.eps + 1e-12)

    def test_interior_ring_inside_disc(self):
        grid = DiscGrid.from_resolution((0.0, 0.0), 1.0, 17)
        int_flat, ring_idx, ring_w, _ = grid.stencil()
        rad_flat = grid.radius.ravel()
        used = np.unique(ring_idx)
        assert np.all(rad_flat[used] <= 1.0 + 2.0 * grid.eps + 1e-9)

    def test_boundary_projection(self):
        grid = DiscGrid.from_resolution((0.0, 0.0), 1.0, 17)
        grid.set_boundary(lambda x, y: x)  # datum = x on the circle
        ii, jj = np.nonzero(grid.dirichlet_mask)
        rad = grid.radius[ii, jj]
        expected = grid.X[ii, jj] / rad  # projection scales x to the unit circle
        np.testing.assert_allclose(grid.values[ii, jj], expected, rtol=1e-12)

    def test_validation(self):
        with pytest.raises(InvalidInput):
            DiscGrid((0.0, 0.0), 1.0, 2.0)
        with pytest.raises(InvalidInput):
            DiscGrid.from_resolution((0.0, 0.0), 1.0, 3)


class TestSchemeValue:
    def test_affine_gives_zero(self):
        grid = DiscGrid.from_resolution((0.0, 0.0), 1.0, 33)
        set_values(grid, lambda x, y: 0.3 + 1.7 * x - 0.4 * y)
        node = tuple(np.argwhere(grid.interior_mask)[0])
        assert scheme_value(grid, node, beta=0.0) == pytest.approx(0.0, abs=1e-9)

    def test_constant_gives_zero(self):
        grid = DiscGrid.from_resolution((0.0, 0.0), 1.0, 17)
        set_values(grid, lambda x, y: np.full_like(x, 2.5))
        node = tuple(np.argwhere(grid.interior_mask)[0])
        assert scheme_value(grid, node, beta=0.0) == 0.0
        assert scheme_value(grid, node, beta=2.0) == pytest.approx(0.0, abs=1e-12)

    def test_normalized_consistency_on_quadratic(self):
        # u = x^2/2 has normalized operator value 1 away from the axis
        grid = DiscGrid.from_resolution((0.0, 0.0), 1.0, 65)
        set_values(grid, lambda x, y: x**2 / 2.0)
        i, j = np.argwhere(grid.interior_mask & (grid.X > 0.5) & (np.abs(grid.Y) < 0.1))[0]
        assert scheme_value(grid, (int(i), int(j)), beta=2.0) == pytest.approx(1.0, rel=1e-9)

    def test_monotone_in_neighbors(self):
        # bumping any lattice value used by the stencil does not decrease the
        # operator wherever the second difference is nonnegative (beta < 2),
        # and unconditionally for the normalized operator
        rng = random.Random(13)
        grid = DiscGrid.from_resolution((0.0, 0.0), 1.0, 17)
        int_nodes = np.argwhere(grid.interior_mask)
        for trial in range(40):
            grid.values[...] = 0.0
            ii, jj = np.nonzero(grid.interior_mask | grid.dirichlet_mask)
            grid.values[ii, jj] = [rng.uniform(0.0, 1.0) for _ in range(ii.size)]
            node = tuple(int_nodes[rng.randrange(len(int_nodes))])
            base2 = scheme_value(grid, node, beta=2.0)
            base0 = scheme_value(grid, node, beta=0.0)
            k = rng.randrange(ii.size)
            tgt = (ii[k], jj[k])
            if tgt == node:
                continue
            grid.values[tgt] += 0.05
            new2 = scheme_value(grid, node, beta=2.0)
            assert new2 >= base2 - 1e-12
            if base0 >= 0.0:
                assert scheme_value(grid, node, beta=0.0) >= base0 - 1e-12

    def test_non_interior_rejected(self):
        grid = DiscGrid.from_resolution((0.0, 0.0), 1.0, 17)
        with pytest.raises(InvalidInput):
            scheme_value(grid, (0, 0), beta=0.0)


class TestSolve:
    def test_zero_datum_zero_solution(self):
        grid = DiscGrid.from_resolution((0.0, 0.0), 1.0, 17)
        sol = solve(ModelSpec(gamma=0.5), grid, 0.0)
        assert sol.converged
        assert sol.residual_inf == 0.0
        assert np.all(sol.values[grid.interior_mask] == 0.0)

    def test_dead_core_forms(self):
        R = 2.0 * thickness(SPEC_BETA0)
        grid = DiscGrid.from_resolution((0.0, 0.0), R, 33)
        sol = solve(SPEC_BETA0, grid, SPEC_BETA0.d)
        assert sol.converged
        center = tuple(np.argwhere(grid.radius == grid.radius.min())[0])
        assert sol.values[center] <= 1e-12
        assert np.all(sol.values[grid.interior_mask] >= 0.0)

    def test_sandwich_against_barrier(self):
        R = 2.0 * thickness(SPEC_BETA0)
        grid = DiscGrid.from_resolution((0.0, 0.0), R, 33)
        sol = solve(SPEC_BETA0, grid, SPEC_BETA0.d)
        profile = select_profile(SPEC_BETA0, R)
        bar = RadialBarrier(profile=profile, center=np.zeros(2))
        pts = np.stack([grid.X, grid.Y], axis=-1)
        upper = eval_barrier(bar, pts)
        ii = grid.interior_mask
        assert np.all(sol.values[ii] >= 0.0)
        assert np.max(sol.values[ii] - upper[ii]) <= 1e-10

    def test_matches_radial_solution(self):
        from deadcore.grid import _bilinear
        from deadcore.radial import measure_deadcore

        R = 2.0 * thickness(SPEC_BETA0)
        grid = DiscGrid.from_resolution((0.0, 0.0), R, 33)
        sol = solve(SPEC_BETA0, grid, SPEC_BETA0.d)
        _, cmp = measure_deadcore(SPEC_BETA0, R)
        rr = np.linspace(0.0, R - 2 * grid.eps, 40)
        u_grid = _bilinear(grid, rr, np.zeros_like(rr))
        u_rad = cmp.evaluate_embedded(rr)
        assert np.max(np.abs(u_grid - u_rad)) <= 1.5 * grid.eps

    def test_gauss_seidel_and_jacobi_agree(self):
        R = 2.0 * thickness(SPEC_BETA2)
        grids = [DiscGrid.from_resolution((0.0, 0.0), R, 17) for _ in range(2)]
        gs = solve(SPEC_BETA2, grids[0], SPEC_BETA2.d)
        ja = solve(SPEC_BETA2, grids[1], SPEC_BETA2.d, options=SolverOptions(mode="jacobi"))
        assert gs.converged and ja.converged
        assert np.max(np.abs(gs.values - ja.values)) <= 1e-6

    def test_not_converged_reported(self):
        grid = DiscGrid.from_resolution((0.0, 0.0), 2.0, 17)
        sol = solve(ModelSpec(gamma=0.5), grid, 1.0, options=SolverOptions(max_iters=2, check_every=1))
        assert not sol.converged
        assert sol.residual_inf > 0.0

    def test_lem_weight_on_grid(self):
        spec = ModelSpec(gamma=0.5, alpha=0.5, nonlinearity=NonlinearityKind.LANE_EMDEN_MATUKUMA)
        R = 2.0 * thickness(spec)
        grid = DiscGrid.from_resolution((0.0, 0.0), R, 17)
        sol = solve(spec, grid, spec.d)
        assert sol.converged
        center = tuple(np.argwhere(grid.radius == grid.radius.min())[0])
        assert sol.values[center] <= 1e-12

    def test_positive_weight_exponent_on_grid(self):
        spec = ModelSpec(gamma=0.5, alpha=1.0)
        R = 2.0 * thickness(spec)
        grid = DiscGrid.from_resolution((0.0, 0.0), R, 17)
        sol = solve(spec, grid, spec.d)
        assert sol.converged
        assert np.all(sol.values[grid.interior_mask] >= 0.0)

    def test_exponential_rejected(self):
        spec = ModelSpec(beta=0.5, m=1.0, alpha=-0.5, c=1, hamiltonian=GP,
                         nonlinearity=NonlinearityKind.EXPONENTIAL)
        grid = DiscGrid.from_resolution((0.0, 0.0), 1.0, 17)
        with pytest.raises(InvalidInput):
            solve(spec, grid, 1.0)

    def test_singular_weight_rejected(self):
        grid = DiscGrid.from_resolution((0.0, 0.0), 1.0, 17)
        with pytest.raises(InvalidInput):
            solve(ModelSpec(alpha=-0.5, gamma=1.0), grid, 1.0)

    def test_inadmissible_rejected(self):
        grid = DiscGrid.from_resolution((0.0, 0.0), 1.0, 17)
        with pytest.raises(InvalidInput):
            solve(ModelSpec(gamma=3.5), grid, 1.0)


def brute_force_jacobi(spec, grid, g, shift, start, sweeps=6000, tol=1e-10):
    """Independent fixed-point oracle: undamped Jacobi with per-node bisection
    in plain numpy, iterated from a constant start."""
    grid.set_boundary(g)
    int_flat, ring_idx, ring_w, rads = grid.stencil()
    u = grid.values.ravel().copy()
    u[int_flat] = start
    eps2 = grid.eps**2
    for _ in range(sweeps):
        ring = np.sum(ring_w * u[ring_idx], axis=2)
        big, small = ring.max(axis=1), ring.min(axis=1)
        grad = (big - small) / (2.0 * grid.eps)
        A = np.ones_like(grad) if spec.beta == 2.0 else np.where(grad > 0, grad ** (2.0 - spec.beta), 0.0)
        lo = np.minimum(small, u[int_flat]) - 10.0
        hi = np.maximum(big, u[int_flat]) + 10.0
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            f = spec.lam * rads**spec.alpha * np.where(mid > 0, np.maximum(mid, 0.0) ** spec.gamma, 0.0)
            ch = spec.c * grad**spec.m if spec.hamiltonian is GP else 0.0
            g_mid = A * (big + small - 2.0 * mid) / eps2 - ch - f - shift
            lo = np.where(g_mid >= 0.0, mid, lo)
            hi = np.where(g_mid >= 0.0, hi, mid)
        new = 0.5 * (lo + hi)
        delta = np.max(np.abs(new - u[int_flat]))
        u[int_flat] = new
        if delta < tol:
            break
    out = u.reshape(grid.shape)
    grid.values[...] = out
    return out


class TestComparisonOracle:
    def test_source_shift_direction(self):
        # larger forcing h pushes the solution down: u_{+delta} <= u_0
        R = 2.0 * thickness(SPEC_BETA2)
        grids = [DiscGrid.from_resolution((0.0, 0.0), R, 9) for _ in range(2)]
        u_shift = brute_force_jacobi(SPEC_BETA2, grids[0], SPEC_BETA2.d, 0.05, start=SPEC_BETA2.d)
        u_plain = brute_force_jacobi(SPEC_BETA2, grids[1], SPEC_BETA2.d, 0.0, start=SPEC_BETA2.d)
        ii = grids[0].interior_mask
        assert np.max(u_shift[ii] - u_plain[ii]) <= 1e-8

    def test_fixed_point_from_above_and_below_agree(self):
        R = 2.0 * thickness(SPEC_ABS2)
        grids = [DiscGrid.from_resolution((0.0, 0.0), R, 9) for _ in range(2)]
        u_above = brute_force_jacobi(SPEC_ABS2, grids[0], SPEC_ABS2.d, 0.0, start=SPEC_ABS2.d)
        u_below = brute_force_jacobi(SPEC_ABS2, grids[1], SPEC_ABS2.d, 0.0, start=0.0)
        ii = grids[0].interior_mask
        assert np.min(u_below[ii]) >= 0.0
        assert np.max(np.abs(u_above[ii] - u_below[ii])) <= 1e-7

    def test_solver_matches_oracle(self):
        R = 2.0 * thickness(SPEC_ABS2)
        g1 = DiscGrid.from_resolution((0.0, 0.0), R, 9)
        g2 = DiscGrid.from_resolution((0.0, 0.0), R, 9)
        oracle = brute_force_jacobi(SPEC_ABS2, g1, SPEC_ABS2.d, 0.0, start=SPEC_ABS2.d)
        sol = solve(SPEC_ABS2, g2, SPEC_ABS2.d, options=SolverOptions(tol=1e-10))
        ii = g1.interior_mask
        assert np.max(np.abs(oracle[ii] - sol.values[ii])) <= 1e-6

    def test_ordered_boundary_data(self):
        R = 2.0 * thickness(SPEC_BETA0)
        grids = [DiscGrid.from_resolution((0.0, 0.0), R, 17) for _ in range(2)]
        lo = solve(SPEC_BETA0, grids[0], SPEC_BETA0.d)
        hi = solve(SPEC_BETA0, grids[1], 1.25 * SPEC_BETA0.d)
        ii = grids[0].interior_mask
        assert np.max(lo.values[ii] - hi.values[ii]) <= 1e-10


class TestInvarianceChecks:
    def test_rotation_on_constant(self):
        grid = DiscGrid.from_resolution((0.0, 0.0), 1.0, 17)
        set_values(grid, lambda x, y: np.full_like(x, 3.0))
        from deadcore.grid import GridSolution

        sol = GridSolution(grid=grid, iterations=0, residual_inf=0.0, converged=True)
        devs = rotation_invariance_check(sol, [math.pi / 6, math.pi / 4])
        assert max(devs) <= 1e-12

    def test_rotation_on_solution(self):
        R = 2.0 * thickness(SPEC_BETA0)
        grid = DiscGrid.from_resolution((0.0, 0.0), R, 33)
        sol = solve(SPEC_BETA0, grid, SPEC_BETA0.d)
        devs = rotation_invariance_check(sol, [math.pi / 6, math.pi / 4])
        lip = lipschitz_estimate(sol, fraction=0.95)
        assert max(devs) <= 2.0 * grid.eps * lip

    def test_quarter_turn_is_lattice_exact(self):
        # pi/2 maps the lattice onto itself: only solver tolerance remains
        R = 2.0 * thickness(SPEC_BETA0)
        grid = DiscGrid.from_resolution((0.0, 0.0), R, 33)
        sol = solve(SPEC_BETA0, grid, SPEC_BETA0.d)
        (dev,) = rotation_invariance_check(sol, [math.pi / 2])
        assert dev <= 1e-6

    def test_lipschitz_zero_function(self):
        grid = DiscGrid.from_resolution((0.0, 0.0), 1.0, 17)
        from deadcore.grid import GridSolution

        sol = GridSolution(grid=grid, iterations=0, residual_inf=0.0, converged=True)
        assert lipschitz_estimate(sol, 0.5) == 0.0

    def test_lipschitz_of_barrier_values(self):
        # nodal barrier values: the largest quotient approaches sup h' = p*tau*T^(p-1)
        spec = ModelSpec()
        R = 2.0 * thickness(spec)
        profile = select_profile(spec, R)
        bar = RadialBarrier(profile=profile, center=np.zeros(2))
        estimates = []
        for n in (33, 65):
            grid = DiscGrid.from_resolution((0.0, 0.0), R, n)
            pts = np.stack([grid.X, grid.Y], axis=-1)
            grid.values[...] = eval_barrier(bar, pts)
            from deadcore.grid import GridSolution

            sol = GridSolution(grid=grid, iterations=0, residual_inf=0.0, converged=True)
            estimates.append(lipschitz_estimate(sol, fraction=1.0))
        sup_slope = profile.p * profile.scale * profile.T ** (profile.p - 1.0)
        assert estimates[1] == pytest.approx(sup_slope, rel=0.2)
        assert max(estimates) / min(estimates) <= 1.2

    def test_csv_export(self, tmp_path):
        grid = DiscGrid.from_resolution((0.0, 0.0), 1.0, 9)
        path = tmp_path / "grid.csv"
        grid_to_csv(grid, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "x,y,u,interior_flag"
        assert len(lines) == 1 + int(np.sum(grid.interior_mask | grid.dirichlet_mask))
