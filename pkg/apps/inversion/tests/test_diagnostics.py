"""Error metric, data fit, initial guess and the Gauss-Newton building blocks."""

import math

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose, assert_array_equal

from apps.core.exceptions import DegenerateRdf
from apps.core.grids import GENERIC, POTENTIAL, RDF, Tabulated, make_grid
from apps.core.state import StatePoint
from apps.inversion.diagnostics import (
    antiderivative_matrix, data_fit, error_metric, pmf_initial_guess,
    pressure_constraint_vector, weighted_sup_norm,
)
from apps.structure.thermo import virial_pressure_quadrature


class ErrorMetricTests(SimpleTestCase):

    def setUp(self):
        self.grid = make_grid(1.0, 5, 3)
        self.g = Tabulated(self.grid, np.ones(5), RDF)
        self.u_ref = Tabulated(self.grid, [3.0, 1.0, 0.0], POTENTIAL)

    def test_identical_potentials(self):
        self.assertEqual(error_metric(self.u_ref, self.u_ref, self.g), 0.0)

    def test_unit_offset(self):
        shifted = self.u_ref.replace(self.u_ref.values + 1.0)
        self.assertAlmostEqual(error_metric(shifted, self.u_ref, self.g), math.sqrt(14.0),
                               places=14)

    def test_homogeneous(self):
        shifted = self.u_ref.replace(self.u_ref.values + 2.5)
        self.assertAlmostEqual(error_metric(shifted, self.u_ref, self.g),
                               2.5 * math.sqrt(14.0), places=13)

    def test_grid_mismatch(self):
        other = Tabulated(make_grid(0.5, 5, 3), [1.0, 1.0, 0.0], POTENTIAL)
        with self.assertRaises(ValueError):
            error_metric(other, self.u_ref, self.g)


class DataFitTests(SimpleTestCase):

    def setUp(self):
        self.grid = make_grid(0.1, 10, 5)
        self.target = Tabulated(self.grid, np.ones(10), RDF)

    def test_perfect_fit(self):
        self.assertEqual(data_fit(self.target, self.target, 0.3), 0.0)

    def test_normalized_by_initial_misfit(self):
        g0 = self.target.replace(np.r_[np.ones(9), 1.4])
        self.assertEqual(data_fit(g0, self.target, 0.4), 1.0)
        half = self.target.replace(np.r_[np.ones(9), 1.2])
        self.assertAlmostEqual(data_fit(half, self.target, 0.4), 0.5, places=14)

    def test_zero_initial_misfit_reports_absolute_deviation(self):
        g0 = self.target.replace(np.r_[0.9, np.ones(9)])
        self.assertAlmostEqual(data_fit(g0, self.target, 0.0), 0.1, places=14)

    def test_weighted_sup_norm(self):
        grid = make_grid(1.0, 3, 3)
        f = Tabulated(grid, [0.0, 0.0, -0.01], GENERIC)
        self.assertAlmostEqual(weighted_sup_norm(f), 0.01 * 10.0 ** 2, places=14)
        self.assertAlmostEqual(weighted_sup_norm(f, alpha=6), 0.01 * 10.0 ** 3, places=12)


class InitialGuessTests(SimpleTestCase):

    def test_ideal_gas(self):
        grid = make_grid(0.1, 20, 10)
        u0 = pmf_initial_guess(Tabulated(grid, np.ones(20), RDF), 1.0)
        assert_array_equal(u0.values, 0.0)

    def test_exponential_rdf(self):
        grid = make_grid(0.1, 20, 10)
        g = Tabulated(grid, np.exp(-grid.points), RDF)
        u0 = pmf_initial_guess(g, 1.0)
        r = grid.potential_points
        assert_allclose(u0.values, r - r[-1], rtol=0, atol=1e-14)

    def test_zero_density_ensemble_inverts_exactly(self):
        grid = make_grid(0.05, 60, 40)
        r = grid.potential_points
        u_star = 0.5 / r - 0.25
        beta = 0.8
        g = np.ones(60)
        g[:40] = np.exp(-beta * u_star)
        u0 = pmf_initial_guess(Tabulated(grid, g, RDF), beta)
        assert_allclose(u0.values, u_star - u_star[-1], rtol=0, atol=1e-13)

    def test_core_is_extrapolated(self):
        grid = make_grid(0.1, 30, 20)
        g = np.ones(30)
        g[:3] = 0.0
        g[3:20] = np.exp(-grid.points[3:20] ** -6)
        u0 = pmf_initial_guess(Tabulated(grid, g, RDF), 1.0)
        self.assertTrue(np.all(np.isfinite(u0.values)))
        self.assertGreater(u0.values[0], u0.values[3])
        self.assertEqual(u0.values[-1], 0.0)

    def test_degenerate(self):
        grid = make_grid(0.1, 20, 10)
        g = np.zeros(20)
        g[-1] = 1.0
        with self.assertRaises(DegenerateRdf):
            pmf_initial_guess(Tabulated(grid, g, RDF), 1.0)


class AntiderivativeTests(SimpleTestCase):

    def test_single_column(self):
        matrix = antiderivative_matrix(make_grid(1.0, 4, 2))
        assert_array_equal(matrix @ [1.0], [1.0, 0.0, 0.0, 0.0])

    def test_vanishes_at_cutoff(self):
        grid = make_grid(0.1, 30, 12)
        w = np.random.default_rng(0).normal(size=11)
        v = antiderivative_matrix(grid) @ w
        self.assertEqual(v[11], 0.0)
        assert_array_equal(v[12:], 0.0)
        assert_allclose(-np.diff(v[:12]) / 0.1, w, rtol=1e-12)

    def test_cumulative_sum(self):
        grid = make_grid(0.5, 10, 6)
        v = antiderivative_matrix(grid) @ np.ones(5)
        assert_allclose(v[:6], 0.5 * (6 - np.arange(1, 7)), rtol=0, atol=1e-15)

    def test_needs_two_points(self):
        with self.assertRaises(ValueError):
            antiderivative_matrix(make_grid(1.0, 3, 1))


class PressureConstraintTests(SimpleTestCase):

    def test_vanishing_rdf(self):
        grid = make_grid(1.0, 5, 3)
        l = pressure_constraint_vector(Tabulated(grid, np.zeros(5), RDF), StatePoint(1.0, 1.0))
        assert_array_equal(l, 0.0)

    def test_first_entry(self):
        grid = make_grid(1.0, 5, 3)
        l = pressure_constraint_vector(Tabulated(grid, np.ones(5), RDF), StatePoint(1.0, 1.0))
        self.assertAlmostEqual(l[0], 2.0 / 3.0 * math.pi * 3.75, places=13)
        self.assertAlmostEqual(l[0], 7.85398, places=5)

    def test_linear_in_g(self):
        grid = make_grid(0.1, 30, 15)
        state = StatePoint(0.4, 1.0)
        g = Tabulated(grid, 1.0 + 0.1 * np.sin(grid.points), RDF)
        assert_allclose(pressure_constraint_vector(g.replace(2 * g.values), state),
                        2 * pressure_constraint_vector(g, state), rtol=1e-15)

    def test_derivative_of_the_quadrature_pressure(self):
        # p(u + A0 w) - p(u) = l.w exactly since the quadrature is affine in u
        grid = make_grid(0.1, 30, 15)
        state = StatePoint(0.4, 1.3)
        g = Tabulated(grid, 1.0 + 0.1 * np.sin(grid.points), RDF)
        u = Tabulated(grid, np.linspace(1.0, 0.0, 15), POTENTIAL)
        w = np.random.default_rng(4).normal(size=14)
        moved = u.replace(u.values + (antiderivative_matrix(grid) @ w)[:15])
        change = virial_pressure_quadrature(moved, g, state) - virial_pressure_quadrature(u, g, state)
        self.assertAlmostEqual(change, pressure_constraint_vector(g, state) @ w, places=12)
