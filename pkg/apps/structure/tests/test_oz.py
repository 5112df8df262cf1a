"""Ornstein-Zernike machinery and the HNC solver."""

import numpy as np
from django.conf import settings
from django.test import SimpleTestCase
from numpy.testing import assert_allclose, assert_array_equal

from apps.core.config import load_run_config
from apps.core.exceptions import NoConvergence, SingularStructureFactor
from apps.core.grids import POTENTIAL, RDF, Tabulated, detect_core_region, make_grid
from apps.core.state import StatePoint
from apps.structure.oz import (
    HncSolver, OzContext, apply_T, assemble_spectral_operator, assemble_T_matrix,
    direct_correlation, hnc_forward_solve, hnc_map, hnc_potential, make_oz_context, t_symbol,
)
from apps.structure.thermo import (
    LjParams, kirkwood_buff_compressibility, reference_potential, truncated_shifted_lj,
)
from apps.structure.transforms import SpectralField, radial_fft_forward

from .fixtures import (
    FIXTURE_GRID, FIXTURE_STATE, fixture_potential, fixture_rdf, fixture_solution,
)


def random_context(rng, m=200, spacing=0.05):
    """A smooth RDF bump around r = 1 at a modest density."""
    grid = make_grid(spacing, m, m)
    r = grid.points
    amplitude = rng.uniform(-0.5, 0.5)
    width = rng.uniform(0.2, 0.4)
    g = 1.0 + amplitude * np.exp(-((r - 1.0) / width) ** 2)
    state = StatePoint(rng.uniform(0.01, 0.1), rng.uniform(0.8, 2.0))
    return make_oz_context(Tabulated(grid, g, RDF), state)


class OzContextTests(SimpleTestCase):

    def test_ideal_gas(self):
        grid = make_grid(0.1, 50, 50)
        ctx = make_oz_context(Tabulated(grid, np.ones(50), RDF), StatePoint(0.5, 1.0))
        assert_array_equal(ctx.h_hat.values, 0.0)
        assert_array_equal(ctx.structure_factor, 1.0)
        assert_array_equal(direct_correlation(ctx).values, 0.0)

    def test_zero_density_has_unit_structure_factor(self):
        ctx = random_context(np.random.default_rng(1))
        zero = make_oz_context(ctx.rdf, StatePoint(0.0, 1.0))
        assert_array_equal(zero.structure_factor, 1.0)
        self.assertEqual(zero.structure_factor_zero, 1.0)

    def test_zero_density_direct_correlation_is_h(self):
        ctx = random_context(np.random.default_rng(2))
        zero = make_oz_context(ctx.rdf, StatePoint(0.0, 1.0))
        assert_allclose(direct_correlation(zero).values, ctx.rdf.values - 1.0,
                        rtol=0, atol=1e-13)

    def test_singular_structure_factor(self):
        # a deep, wide correlation hole drives S(0) through zero
        grid = make_grid(0.05, 200, 200)
        g = np.where(grid.points < 2.0, 0.0, 1.0)
        with self.assertRaises(SingularStructureFactor) as caught:
            make_oz_context(Tabulated(grid, g, RDF), StatePoint(0.5, 1.0))
        self.assertEqual(caught.exception.exit_code, 4)

    def test_oz_identity(self):
        rng = np.random.default_rng(2019)
        for _ in range(20):
            ctx = random_context(rng)
            rho = ctx.state.density
            c_hat = radial_fft_forward(direct_correlation(ctx)).values
            h_hat = ctx.h_hat.values
            self.assertLessEqual(np.abs(c_hat * (1 + rho * h_hat) - h_hat).max(), 1e-12)

    def test_structure_factor_zero_limit(self):
        ctx = random_context(np.random.default_rng(8))
        self.assertAlmostEqual(
            ctx.structure_factor_zero,
            1.0 + ctx.state.density * ctx.h_hat.zero_limit, places=14,
        )


class CorrectionOperatorTests(SimpleTestCase):

    def hand_context(self, rho_h):
        grid = make_grid(0.1, 2, 2)
        state = StatePoint(0.5, 1.0)
        h_hat = SpectralField(grid, np.asarray(rho_h) / state.density, 0.0)
        return OzContext(state, Tabulated(grid, [1.0, 1.0], RDF), h_hat,
                         1.0 + np.asarray(rho_h), 1.0)

    def test_symbol_closed_forms(self):
        t = t_symbol(self.hand_context([1.0, -0.5])).values
        assert_allclose(t, [0.75, -3.0], rtol=1e-15)

    def test_ideal_gas_symbol_vanishes(self):
        grid = make_grid(0.1, 30, 30)
        ctx = make_oz_context(Tabulated(grid, np.ones(30), RDF), StatePoint(0.3, 1.0))
        assert_array_equal(t_symbol(ctx).values, 0.0)
        f = Tabulated(grid, np.linspace(-1, 1, 30))
        assert_array_equal(apply_T(ctx, f).values, 0.0)
        assert_array_equal(assemble_T_matrix(ctx), 0.0)

    def test_two_point_matrix_by_hand(self):
        # F and F^-1 for m = 2 are sin(pi l j / 3) sums; diag(1, 2) gives
        # [[3/2, -1], [-1/4, 3/2]] after the r_k / r_j weights
        matrix = assemble_spectral_operator(make_grid(0.1, 2, 2), [1.0, 2.0])
        assert_allclose(matrix, [[1.5, -1.0], [-0.25, 1.5]], rtol=0, atol=1e-14)

    def test_spectral_and_matrix_routes_agree(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            ctx = random_context(rng, m=120)
            f = Tabulated(ctx.grid, rng.normal(size=120))
            matrix = assemble_T_matrix(ctx)
            assert_allclose(matrix @ f.values, apply_T(ctx, f).values, rtol=0, atol=1e-10)

    def test_linearity(self):
        rng = np.random.default_rng(9)
        ctx = random_context(rng)
        f, g = rng.normal(size=(2, ctx.grid.m))
        left = apply_T(ctx, Tabulated(ctx.grid, 3.0 * f + g)).values
        right = 3.0 * apply_T(ctx, Tabulated(ctx.grid, f)).values + apply_T(
            ctx, Tabulated(ctx.grid, g)).values
        assert_allclose(left, right, rtol=0, atol=1e-12 * np.abs(right).max())


class HncPotentialTests(SimpleTestCase):

    def test_ideal_gas_potential_is_zero(self):
        grid = make_grid(0.1, 60, 30)
        u = hnc_potential(Tabulated(grid, np.ones(60), RDF), StatePoint(0.4, 1.2))
        assert_array_equal(u.values, 0.0)

    def test_zero_density_gives_mean_force(self):
        ctx = random_context(np.random.default_rng(4))
        state = StatePoint(0.0, 1.3)
        raw = hnc_map(make_oz_context(ctx.rdf, state))
        assert_allclose(raw, -np.log(ctx.rdf.values) / state.beta, rtol=0, atol=1e-12)

    def test_recovers_the_potential_behind_an_hnc_rdf(self):
        g = fixture_rdf()
        u = fixture_potential()
        recovered = hnc_potential(g, FIXTURE_STATE)
        j0 = detect_core_region(g, g).index
        self.assertGreater(j0, 0)
        assert_allclose(recovered.values[j0:], u.values[j0:], rtol=0, atol=1e-8)


class HncSolverTests(SimpleTestCase):

    def test_zero_potential_gives_ideal_gas(self):
        grid = make_grid(0.05, 100, 50)
        u = Tabulated(grid, np.zeros(50), POTENTIAL)
        assert_array_equal(hnc_forward_solve(u, StatePoint(0.5, 1.0)).values, 1.0)

    def test_low_density_limit(self):
        grid = make_grid(0.02, 300, 125)
        u = Tabulated(grid, truncated_shifted_lj(grid.potential_points), POTENTIAL)
        state = StatePoint(1e-8, 1.5)
        g = hnc_forward_solve(u, state)
        assert_allclose(g.values, np.exp(-state.beta * u.full()), rtol=0, atol=1e-6)

    def test_fixture_satisfies_the_closure(self):
        solution = fixture_solution()
        u = fixture_potential()
        closure = np.exp(-FIXTURE_STATE.beta * u.full() + solution.gamma)
        self.assertLessEqual(np.abs(solution.rdf.values - closure).max(), 1e-9)
        self.assertEqual(solution.rdf.grid, FIXTURE_GRID)
        ctx = make_oz_context(solution.rdf, FIXTURE_STATE)
        c_hat = radial_fft_forward(direct_correlation(ctx)).values
        h_hat = ctx.h_hat.values
        self.assertLessEqual(
            np.abs(c_hat * (1 + FIXTURE_STATE.density * h_hat) - h_hat).max(), 1e-10)

    def test_warm_start_converges_immediately(self):
        solution = fixture_solution()
        solver = HncSolver(FIXTURE_STATE, mix=0.2, tolerance=1e-9)
        again = solver.solve(fixture_potential(), initial_gamma=solution.gamma)
        self.assertLess(again.iterations, 5)

    def test_iteration_budget(self):
        solver = HncSolver(FIXTURE_STATE, mix=0.2, tolerance=1e-12, max_iterations=3)
        with self.assertRaises(NoConvergence) as caught:
            solver.solve(fixture_potential())
        self.assertEqual(caught.exception.iterations, 3)
        self.assertEqual(caught.exception.exit_code, 3)

    def test_mixing_must_be_positive(self):
        with self.assertRaises(ValueError):
            HncSolver(FIXTURE_STATE, mix=0.0)


class HncColdStartTests(SimpleTestCase):
    """Liquid state points that a plain Picard start from gamma = 0 cannot reach."""

    def assert_hnc_solution(self, u, state, solution, atol):
        g = solution.rdf
        self.assertTrue(np.all(np.isfinite(g.values)))
        closure = np.exp(-state.beta * u.full() + solution.gamma)
        self.assertLessEqual(np.abs(g.values - closure).max(), 1e-12)
        make_oz_context(g, state)
        recovered = hnc_potential(g, state)
        j0 = detect_core_region(g, g).index
        assert_allclose(recovered.values[j0:], u.values[j0:], rtol=0, atol=atol)

    def test_fixture_needs_the_density_ramp(self):
        solution = fixture_solution()
        self.assertGreater(solution.stages, 1)
        self.assertLessEqual(solution.residual, 1e-11)
        self.assert_hnc_solution(fixture_potential(), FIXTURE_STATE, solution, 1e-8)

    def test_direct_start_loses_positivity_on_the_fixture(self):
        solver = HncSolver(FIXTURE_STATE, mix=0.2)
        with self.assertRaises(SingularStructureFactor):
            solver._iterate(FIXTURE_GRID, np.exp(-FIXTURE_STATE.beta * fixture_potential().full()),
                            FIXTURE_STATE.density, np.zeros(FIXTURE_GRID.m), 1e-10)

    def test_critical_point_config(self):
        cfg = load_run_config(settings.BASE_DIR / 'configs' / 'critical_hnc.ini')
        u = cfg.model_potential()
        solution = HncSolver(cfg.state, **cfg.hnc).solve(u)
        self.assertLessEqual(solution.residual, cfg.hnc['tolerance'])
        self.assert_hnc_solution(u, cfg.state, solution, 1e-5)
        self.assertGreater(kirkwood_buff_compressibility(solution.rdf, cfg.state), 1.0)

    def test_triple_point(self):
        grid = make_grid(0.02, 335, 125)
        u = reference_potential(grid, LjParams(cutoff=2.5))
        state = StatePoint(0.8, 1.0)
        solution = HncSolver(state).solve(u)
        self.assertGreater(solution.stages, 1)
        self.assert_hnc_solution(u, state, solution, 1e-5)
        self.assertGreater(solution.rdf.values.max(), 2.0)

    def test_ramp_gives_up_below_the_smallest_increment(self):
        solver = HncSolver(FIXTURE_STATE, mix=0.2, tolerance=1e-12, max_iterations=1)
        with self.assertRaises((NoConvergence, SingularStructureFactor)):
            solver.solve(fixture_potential())
