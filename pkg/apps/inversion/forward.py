"""
=============================================================================
Forward Operators - g_k = G(u_k)
=============================================================================

The inversion driver only needs a callable that turns a potential into an
RDF and a pressure. Three are built in:

    HncForward         HNC integral equation, warm-started from the previous
                       solve; pressure from the virial quadrature
    MdForward          NVT molecular dynamics; each call uses its own seed
                       (base seed + call index) so a run is reproducible
    LowDensityForward  g = exp(-beta u), the zero-density limit

=============================================================================
"""

import dataclasses
import logging
from dataclasses import dataclass, field

import numpy as np

from apps.core.exceptions import NoConvergence, SingularStructureFactor
from apps.core.grids import RDF, Tabulated
from apps.simulation.md import run_nvt
from apps.structure.oz import (
    DEFAULT_MAX_ITERATIONS, DEFAULT_MIX, DEFAULT_S_MIN, DEFAULT_TOLERANCE, HncSolver,
)
from apps.structure.thermo import virial_pressure_quadrature

logger = logging.getLogger(__name__)

# Offset between the seed of a synthetic MD target and the iteration seeds
TARGET_SEED_OFFSET = 10007


@dataclass(frozen=True, eq=False)
class ForwardResult:
    rdf: Tabulated
    pressure: float
    pressure_error: float = 0.0
    details: dict = field(default_factory=dict)


class ForwardOperator:
    """Base class; subclasses implement __call__(u) -> ForwardResult."""

    name = None

    def __init__(self, state):
        self.state = state
        self.calls = 0

    def __call__(self, u):
        raise NotImplementedError


class HncForward(ForwardOperator):
    name = 'HNC'

    def __init__(self, state, mix=DEFAULT_MIX, tolerance=DEFAULT_TOLERANCE,
                 max_iterations=DEFAULT_MAX_ITERATIONS, s_min=DEFAULT_S_MIN, warm_start=True):
        super().__init__(state)
        self.solver = HncSolver(state, mix, tolerance, max_iterations, s_min)
        self.warm_start = warm_start
        self._gamma = None

    def __call__(self, u):
        self.calls += 1
        try:
            solution = self.solver.solve(u, initial_gamma=self._gamma)
        except (NoConvergence, SingularStructureFactor):
            if self._gamma is None:
                raise
            logger.info('Warm-started HNC solve failed; retrying from gamma = 0')
            solution = self.solver.solve(u)
        if self.warm_start:
            self._gamma = solution.gamma
        pressure = virial_pressure_quadrature(u, solution.rdf, self.state)
        return ForwardResult(
            solution.rdf, pressure,
            details={'iterations': solution.iterations, 'residual': solution.residual},
        )


class MdForward(ForwardOperator):
    name = 'MD'

    def __init__(self, state, params):
        super().__init__(state)
        self.params = params

    def __call__(self, u):
        params = dataclasses.replace(self.params, seed=self.params.seed + self.calls)
        self.calls += 1
        result = run_nvt(u, self.state, params)
        return ForwardResult(
            result.rdf, result.pressure, result.pressure_error,
            details={'rdf_error': result.rdf_error, 'temperature': result.temperature,
                     'frames': result.frames},
        )


class LowDensityForward(ForwardOperator):
    name = 'LDL'

    def __call__(self, u):
        self.calls += 1
        with np.errstate(over='ignore'):
            g = np.exp(-self.state.beta * u.full())
        rdf = Tabulated(u.grid, g, RDF)
        return ForwardResult(rdf, virial_pressure_quadrature(u, rdf, self.state))


def make_forward(name, state, hnc=None, md=None):
    """
    Build a forward operator by tag. `hnc` is a dict of HncSolver keyword
    arguments, `md` an MdParams instance (required for MD).
    """
    if name == 'HNC':
        return HncForward(state, **(hnc or {}))
    if name == 'MD':
        if md is None:
            raise ValueError('the MD forward operator needs MdParams')
        return MdForward(state, md)
    if name == 'LDL':
        return LowDensityForward(state)
    raise ValueError(f'unknown forward operator {name!r}')


def synthesize_target(source, potential, state, hnc=None, md=None):
    """
    Target RDF computed from a known potential ('hnc', 'md' or 'ldl'), the
    stand-in for measured data in reproducible runs.
    """
    name = source.upper()
    if name == 'MD' and md is not None:
        md = dataclasses.replace(md, seed=md.seed + TARGET_SEED_OFFSET)
    forward = make_forward(name, state, hnc=hnc, md=md)
    if isinstance(forward, HncForward):
        forward.warm_start = False
    logger.info('Synthesizing the target RDF with the %s forward operator', name)
    return forward(potential).rdf
