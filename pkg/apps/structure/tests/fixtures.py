"""
Shared HNC fixture: truncated-shifted LJ (r_c = 2.5) at rho0 = 0.3,
T = 1.5 on dr = 0.02, m = 463, n = 125.

Solved once per test process; the inversion tests reuse it as their
target RDF.
"""

from functools import lru_cache

from apps.core.grids import make_grid
from apps.core.state import StatePoint
from apps.structure.oz import HncSolver
from apps.structure.thermo import LjParams, reference_potential

FIXTURE_STATE = StatePoint(0.3, 1.5)
FIXTURE_GRID = make_grid(0.02, 463, 125)
FIXTURE_TOLERANCE = 1e-11


def fixture_potential():
    return reference_potential(FIXTURE_GRID, LjParams(cutoff=2.5))


@lru_cache(maxsize=None)
def fixture_solution():
    solver = HncSolver(FIXTURE_STATE, mix=0.2, tolerance=FIXTURE_TOLERANCE,
                       max_iterations=20000)
    return solver.solve(fixture_potential())


def fixture_rdf():
    return fixture_solution().rdf
