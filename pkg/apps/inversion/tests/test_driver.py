"""Inversion driver on the HNC fixture."""

import numpy as np
from django.test import SimpleTestCase

from apps.core.exceptions import NoConvergence
from apps.inversion.driver import run_inversion
from apps.inversion.forward import HncForward
from apps.inversion.schemes import SchemeConfig
from apps.inversion.signals import iteration_completed
from apps.structure.tests.fixtures import FIXTURE_STATE, fixture_potential, fixture_rdf


def hnc_forward():
    return HncForward(FIXTURE_STATE, mix=0.2, max_iterations=20000)


def first_below(ratios, threshold):
    below = np.flatnonzero(ratios < threshold)
    return int(below[0]) if below.size else None


class FailingForward(HncForward):
    """Gives up on the n-th call."""

    def __init__(self, fail_on):
        super().__init__(FIXTURE_STATE, mix=0.2, max_iterations=20000)
        self.fail_on = fail_on

    def __call__(self, u):
        if self.calls + 1 == self.fail_on:
            self.calls += 1
            raise NoConvergence('forced failure', 0, 1.0)
        return super().__call__(u)


class DriverTests(SimpleTestCase):

    def run_scheme(self, name, iterations=8, **config):
        cfg = SchemeConfig(name, max_iterations=iterations, tolerance=0.0, **config)
        return run_inversion(fixture_rdf(), FIXTURE_STATE, cfg, hnc_forward(),
                             u_ref=fixture_potential())

    def test_newton_schemes_converge_quickly(self):
        for name in ('IHNC', 'HNCN'):
            with self.subTest(scheme=name):
                history = self.run_scheme(name)
                self.assertIsNone(history.failure)
                self.assertEqual(len(history), 9)
                self.assertIsNotNone(first_below(history.relative_errors(), 1e-2))

    def test_ibi_is_slower(self):
        ihnc = first_below(self.run_scheme('IHNC').relative_errors(), 1e-2)
        ibi = first_below(self.run_scheme('IBI').relative_errors(), 1e-2)
        self.assertTrue(ibi is None or ibi > ihnc)

    def test_zero_iterations_keep_the_initial_guess(self):
        history = self.run_scheme('IHNC', iterations=0)
        self.assertEqual(len(history), 1)
        record = history[0]
        self.assertEqual(record.k, 0)
        self.assertEqual(record.data_fit, 1.0)
        self.assertGreater(record.epsilon, 0.0)
        self.assertTrue(np.isnan(record.constraint_residual))

    def test_stops_at_tolerance(self):
        cfg = SchemeConfig('IHNC', max_iterations=30, tolerance=1e-3)
        history = run_inversion(fixture_rdf(), FIXTURE_STATE, cfg, hnc_forward())
        self.assertLess(len(history), 31)
        self.assertLessEqual(history[-1].data_fit, 1e-3)
        self.assertTrue(np.isnan(history[-1].epsilon))

    def test_records_are_contiguous(self):
        history = self.run_scheme('LWR', iterations=3)
        self.assertEqual([record.k for record in history], [0, 1, 2, 3])
        for record in history:
            self.assertEqual(record.potential.values[-1], 0.0)
            self.assertTrue(np.isfinite(record.pressure))

    def test_forward_failure_is_recorded(self):
        cfg = SchemeConfig('IHNC', max_iterations=5, tolerance=0.0)
        history = run_inversion(fixture_rdf(), FIXTURE_STATE, cfg, FailingForward(fail_on=3))
        self.assertEqual(len(history), 3)
        self.assertIsInstance(history.failure, NoConvergence)
        self.assertTrue(history[-1].status.startswith('failed: forced failure'))
        self.assertTrue(all(record.ok for record in history[:2]))
        self.assertIn(history.best.k, (0, 1))

    def test_signal_is_sent_for_every_record(self):
        received = []

        def collect(sender, record, history, **kwargs):
            received.append((sender.name, record.k))

        iteration_completed.connect(collect)
        try:
            self.run_scheme('HNCN', iterations=2)
        finally:
            iteration_completed.disconnect(collect)
        self.assertEqual(received, [('HNCN', 0), ('HNCN', 1), ('HNCN', 2)])

    def test_pressure_constrained_gauss_newton(self):
        u_star = fixture_potential()
        p_star = hnc_forward()(u_star).pressure
        target = 1.1 * p_star
        cfg = SchemeConfig('HNCGN', max_iterations=15, tolerance=0.0, pressure_target=target)
        history = run_inversion(fixture_rdf(), FIXTURE_STATE, cfg, hnc_forward())
        self.assertIsNone(history.failure)
        for record in history[:-1]:
            self.assertLessEqual(abs(record.constraint_residual),
                                 1e-10 * max(abs(target - record.pressure), 1.0))
        best = history.best
        self.assertGreater(best.k, 0)
        self.assertLessEqual(abs(best.pressure - target), 0.05 * abs(target))
