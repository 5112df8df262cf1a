"""transform and hnc_solve management commands."""

import io
import tempfile
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from apps.core.tables import read_table, write_table

CONFIG = """
[meta]
version = 1

[state]
density = 0.3
temperature = 1.5

[grid]
spacing = 0.05
rdf_points = 120
potential_points = 50

[model]
kind = {kind}

[hnc]
mix = {mix}
"""


class CommandTestCase(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def call(self, *args):
        out = io.StringIO()
        call_command(*args, stdout=out)
        return out.getvalue()


class TransformCommandTests(CommandTestCase):

    def test_forward_then_inverse(self):
        r = 0.05 * np.arange(1, 401)
        source = self.dir / 'gaussian.dat'
        write_table(source, r, np.exp(-np.pi * r * r))
        self.call('transform', str(source), str(self.dir / 'hat.dat'))
        omega, values = read_table(self.dir / 'hat.dat')
        self.assertEqual(omega[0], 0.0)
        self.assertEqual(len(omega), 401)
        low = omega <= 5.0
        assert_allclose(values[low], np.exp(-np.pi * omega[low] ** 2), rtol=0, atol=1e-6)

        self.call('transform', str(self.dir / 'hat.dat'), str(self.dir / 'back.dat'),
                  '--direction', 'inverse')
        radii, back = read_table(self.dir / 'back.dat')
        assert_allclose(radii, r, rtol=1e-12)
        assert_allclose(back, np.exp(-np.pi * r * r), rtol=0, atol=1e-12)

    def test_malformed_table_exits_with_config_code(self):
        source = self.dir / 'broken.dat'
        source.write_text('0.1 1.0\na b c d\n')
        with self.assertRaises(CommandError) as caught:
            self.call('transform', str(source), str(self.dir / 'out.dat'))
        self.assertEqual(caught.exception.returncode, 2)
        self.assertIn(':2:', str(caught.exception))

    def test_missing_input(self):
        with self.assertRaises(CommandError) as caught:
            self.call('transform', str(self.dir / 'absent.dat'), str(self.dir / 'out.dat'))
        self.assertEqual(caught.exception.returncode, 2)


class HncSolveCommandTests(CommandTestCase):

    def write_config(self, kind='zero', mix=0.2):
        path = self.dir / 'hnc.ini'
        path.write_text(CONFIG.format(kind=kind, mix=mix))
        return path

    def test_ideal_gas(self):
        config = self.write_config()
        output = self.call('hnc_solve', str(config))
        radii, g = read_table(self.dir / 'hnc' / 'rdf_hnc.dat')
        self.assertEqual(len(radii), 120)
        assert_allclose(g, 1.0)
        self.assertIn('S(0)', output)

    def test_explicit_output(self):
        config = self.write_config(kind='tslj')
        target = self.dir / 'g.dat'
        self.call('hnc_solve', str(config), '--output', str(target))
        _, g = read_table(target)
        self.assertEqual(g[0], 0.0)
        self.assertAlmostEqual(g[-1], 1.0, places=2)

    def test_zero_mixing_is_a_config_error(self):
        config = self.write_config(mix=0)
        with self.assertRaises(CommandError) as caught:
            self.call('hnc_solve', str(config))
        self.assertEqual(caught.exception.returncode, 2)

    def test_missing_potential(self):
        config = self.write_config(kind='none')
        with self.assertRaises(CommandError) as caught:
            self.call('hnc_solve', str(config))
        self.assertEqual(caught.exception.returncode, 2)
