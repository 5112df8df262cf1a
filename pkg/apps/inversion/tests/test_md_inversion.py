"""IHNC against molecular dynamics at the critical point (long running)."""

import numpy as np
from django.test import SimpleTestCase, tag

from apps.core.grids import make_grid
from apps.core.state import StatePoint
from apps.inversion.driver import run_inversion
from apps.inversion.forward import MdForward, synthesize_target
from apps.inversion.schemes import SchemeConfig
from apps.simulation.md import MdParams
from apps.structure.thermo import reference_potential


@tag('slow')
class CriticalPointInversionTests(SimpleTestCase):

    def test_ihnc_with_md_forward(self):
        state = StatePoint(0.304, 1.316, particles=500)
        # m capped by L/2 = 5.90
        grid = make_grid(0.02, 295, 125)
        u_star = reference_potential(grid)
        params = MdParams(equilibration_steps=10000, production_steps=35000, stride=10,
                          seed=2019)
        target = synthesize_target('md', u_star, state, md=params)

        cfg = SchemeConfig('IHNC', max_iterations=7, tolerance=0.0, forward='MD')
        history = run_inversion(target, state, cfg, MdForward(state, params), u_ref=u_star)

        self.assertIsNone(history.failure)
        fits = np.array([record.data_fit for record in history])
        self.assertLess(fits[1:].min(), 0.2)
        self.assertLess(np.nanmin(history.relative_errors()[1:]), 0.3)
