"""
=============================================================================
Update Rules for the Inverse Henderson Iteration
=============================================================================

Each rule maps (u_k, g_k = G(u_k), target g) to u_{k+1}. All increments
live on the potential subgrid; the core (recomputed every step from g and
g_k) is re-extrapolated and the tail shifted so that u_{k+1}(r_n) = 0.

    IBI     u + (1/beta) log(g_k/g)
    REL     u + (1/beta) (g_k - g)/g
    IHNC    u + (1/beta) log(g_k/g)     + (1/beta) phi_k
    HNCN    u + (1/beta) (g_k - g)/g    + (1/beta) phi_k
    PYV     u + (1/beta) log(g_k/g)     + (1/beta) phi_k / y_k
    LWR     u + U(g) - U(g_k)
    HNCGN   u + A_0 w, w from the Gauss-Newton subproblem

with phi_k = T (g - g_k), T linearised at the TARGET g and built once per
inversion, and y_k = g_k exp(beta u_k) the cavity function of iterate k.

Two layers:
    - step functions (ibi_step, ...) are pure and take everything they need
    - scheme classes wrap them for the driver; the mixins cache what does
      not change between iterations (target OZ context, Gauss-Newton
      factorisations)

=============================================================================
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from apps.core.exceptions import CavityUnderflow, ConfigError
from apps.core.grids import (
    DEFAULT_CORE_THRESHOLD, GENERIC, detect_core_region, finalize_potential,
)
from apps.structure.oz import (
    DEFAULT_S_MIN, apply_T, direct_correlation, make_oz_context,
)

from .gauss_newton import GaussNewtonSubproblem, gauss_newton_update

SCHEME_NAMES = ('IBI', 'REL', 'IHNC', 'HNCN', 'LWR', 'PYV', 'HNCGN')
FORWARD_NAMES = ('HNC', 'MD', 'LDL')

# Stop tolerances on the relative data fit when none is configured
DEFAULT_TOLERANCE = {'HNC': 1e-6, 'LDL': 1e-6, 'MD': 0.05}

CAVITY_FLOOR = 1e-12


@dataclass(frozen=True)
class SchemeConfig:
    """Which update rule to run and when to stop."""

    name: str
    max_iterations: int = 30
    tolerance: float = None
    weight_exponent: float = 0.0
    pressure_target: float = None
    forward: str = 'HNC'
    keep_best: bool = True
    core_threshold: float = DEFAULT_CORE_THRESHOLD
    s_min: float = DEFAULT_S_MIN

    def __post_init__(self):
        if self.name not in SCHEME_NAMES:
            raise ConfigError(f'unknown scheme {self.name!r}; choose one of {", ".join(SCHEME_NAMES)}')
        if self.forward not in FORWARD_NAMES:
            raise ConfigError(f'unknown forward operator {self.forward!r}')
        if self.pressure_target is not None and self.name != 'HNCGN':
            raise ConfigError('a pressure target is only allowed with the HNCGN scheme')
        if self.max_iterations < 0:
            raise ConfigError('max_iterations cannot be negative')
        if self.weight_exponent < 0:
            raise ConfigError('weight exponent must be nonnegative')

    @property
    def stop_tolerance(self):
        if self.tolerance is not None:
            return self.tolerance
        return DEFAULT_TOLERANCE[self.forward]


# =============================================================================
# STEP FUNCTIONS
# =============================================================================

def _ratio_terms(g_k, g, n):
    with np.errstate(divide='ignore', invalid='ignore'):
        ratio = g_k.values[:n] / g.values[:n]
    return ratio


def _apply(u_k, increment, core):
    return finalize_potential(u_k.grid, u_k.values + increment, core)


def _correction(oz, g_k, g):
    """phi_k = T (g - g_k) on the potential subgrid."""
    difference = g.replace(g.values - g_k.values, kind=GENERIC)
    return apply_T(oz, difference).values[:g.grid.n]


def ibi_step(u_k, g_k, g, beta, threshold=DEFAULT_CORE_THRESHOLD):
    """Iterative Boltzmann inversion."""
    core = detect_core_region(g, g_k, threshold)
    with np.errstate(divide='ignore', invalid='ignore'):
        increment = np.log(_ratio_terms(g_k, g, g.grid.n)) / beta
    return _apply(u_k, increment, core)


def relative_step(u_k, g_k, g, beta, threshold=DEFAULT_CORE_THRESHOLD):
    """IBI with the logarithm replaced by the relative difference."""
    core = detect_core_region(g, g_k, threshold)
    increment = (_ratio_terms(g_k, g, g.grid.n) - 1.0) / beta
    return _apply(u_k, increment, core)


def ihnc_step(u_k, g_k, g, state, threshold=DEFAULT_CORE_THRESHOLD, oz=None):
    """Inverse hypernetted-chain iteration."""
    if oz is None:
        oz = make_oz_context(g, state)
    core = detect_core_region(g, g_k, threshold)
    with np.errstate(divide='ignore', invalid='ignore'):
        boltzmann = np.log(_ratio_terms(g_k, g, g.grid.n))
    increment = (boltzmann + _correction(oz, g_k, g)) / state.beta
    return _apply(u_k, increment, core)


def hncn_step(u_k, g_k, g, state, threshold=DEFAULT_CORE_THRESHOLD, oz=None):
    """Hypernetted-chain Newton iteration."""
    if oz is None:
        oz = make_oz_context(g, state)
    core = detect_core_region(g, g_k, threshold)
    relative = _ratio_terms(g_k, g, g.grid.n) - 1.0
    increment = (relative + _correction(oz, g_k, g)) / state.beta
    return _apply(u_k, increment, core)


def lwr_step(u_k, g_k, g, state, threshold=DEFAULT_CORE_THRESHOLD, oz=None,
             s_min=DEFAULT_S_MIN):
    """
    Secant update u_k + U(g) - U(g_k). Needs a valid OZ context for g_k as
    well, so it is rebuilt every iteration.
    """
    if oz is None:
        oz = make_oz_context(g, state)
    oz_k = make_oz_context(g_k, state, s_min)
    core = detect_core_region(g, g_k, threshold)
    n = g.grid.n
    c = direct_correlation(oz).values[:n]
    c_k = direct_correlation(oz_k).values[:n]
    with np.errstate(divide='ignore', invalid='ignore'):
        boltzmann = np.log(_ratio_terms(g_k, g, n))
    increment = (boltzmann + g.values[:n] - g_k.values[:n] - c + c_k) / state.beta
    return _apply(u_k, increment, core)


def cavity_function(u_k, g_k, beta):
    """y_k = g_k exp(beta u_k) on the potential subgrid."""
    with np.errstate(over='ignore', invalid='ignore'):
        return g_k.values[:len(u_k.values)] * np.exp(beta * u_k.values)


def pyv_step(u_k, g_k, g, state, threshold=DEFAULT_CORE_THRESHOLD, oz=None):
    """IHNC with phi_k replaced by phi_k / y_k (Percus-Yevick flavour)."""
    if oz is None:
        oz = make_oz_context(g, state)
    core = detect_core_region(g, g_k, threshold)
    n = g.grid.n
    cavity = cavity_function(u_k, g_k, state.beta)
    outside = slice(core.index, n)
    small = np.flatnonzero(~(cavity[outside] > CAVITY_FLOOR))
    if small.size:
        radius = u_k.radii[core.index + small[0]]
        raise CavityUnderflow(
            f'cavity function y_k = {cavity[core.index + small[0]]:.3e} at r = {radius:g}'
        )
    with np.errstate(divide='ignore', invalid='ignore'):
        boltzmann = np.log(_ratio_terms(g_k, g, n))
        increment = (boltzmann + _correction(oz, g_k, g) / cavity) / state.beta
    return _apply(u_k, increment, core)


def hncgn_step(u_k, g_k, g, state, cfg, p_k, oz=None):
    """
    Hypernetted-chain Gauss-Newton step; with cfg.pressure_target the step
    satisfies the linearised pressure constraint exactly.
    """
    if oz is None:
        oz = make_oz_context(g, state, cfg.s_min)
    core = detect_core_region(g, g_k, cfg.core_threshold)
    subproblem = GaussNewtonSubproblem(oz, core, cfg.weight_exponent)
    change = None if cfg.pressure_target is None else cfg.pressure_target - p_k
    return gauss_newton_update(u_k, g_k, subproblem, change).potential


# =============================================================================
# SCHEME CLASSES
# =============================================================================

@dataclass(frozen=True, eq=False)
class SchemeStep:
    """What the driver gets back from one update."""

    potential: object
    constraint_residual: float = math.nan


class InversionScheme:
    """
    Base class for the update rules.

    Subclasses set `name` and implement update(); the driver only calls
    step().
    """

    name = None

    def __init__(self, target, state, config):
        self.target = target
        self.state = state
        self.config = config

    @property
    def threshold(self):
        return self.config.core_threshold

    def update(self, u_k, g_k, pressure):
        raise NotImplementedError

    def step(self, u_k, g_k, pressure=None):
        return SchemeStep(self.update(u_k, g_k, pressure))


class TargetOzMixin:
    """Caches the OZ context of the target RDF (T is linearised there)."""

    @cached_property
    def oz(self):
        return make_oz_context(self.target, self.state, self.config.s_min)


class IbiScheme(InversionScheme):
    name = 'IBI'

    def update(self, u_k, g_k, pressure):
        return ibi_step(u_k, g_k, self.target, self.state.beta, self.threshold)


class RelativeScheme(InversionScheme):
    name = 'REL'

    def update(self, u_k, g_k, pressure):
        return relative_step(u_k, g_k, self.target, self.state.beta, self.threshold)


class IhncScheme(TargetOzMixin, InversionScheme):
    name = 'IHNC'

    def update(self, u_k, g_k, pressure):
        return ihnc_step(u_k, g_k, self.target, self.state, self.threshold, oz=self.oz)


class HncnScheme(TargetOzMixin, InversionScheme):
    name = 'HNCN'

    def update(self, u_k, g_k, pressure):
        return hncn_step(u_k, g_k, self.target, self.state, self.threshold, oz=self.oz)


class LwrScheme(TargetOzMixin, InversionScheme):
    name = 'LWR'

    def update(self, u_k, g_k, pressure):
        return lwr_step(u_k, g_k, self.target, self.state, self.threshold, oz=self.oz,
                        s_min=self.config.s_min)


class PyvScheme(TargetOzMixin, InversionScheme):
    name = 'PYV'

    def update(self, u_k, g_k, pressure):
        return pyv_step(u_k, g_k, self.target, self.state, self.threshold, oz=self.oz)


class HncgnScheme(TargetOzMixin, InversionScheme):
    """Gauss-Newton scheme; keeps one factorised subproblem per core index."""

    name = 'HNCGN'

    def __init__(self, target, state, config):
        super().__init__(target, state, config)
        self._subproblems = {}

    def subproblem(self, core):
        if core.index not in self._subproblems:
            self._subproblems[core.index] = GaussNewtonSubproblem(
                self.oz, core, self.config.weight_exponent
            )
        return self._subproblems[core.index]

    def step(self, u_k, g_k, pressure=None):
        core = detect_core_region(self.target, g_k, self.threshold)
        change = None
        if self.config.pressure_target is not None:
            change = self.config.pressure_target - pressure
        update = gauss_newton_update(u_k, g_k, self.subproblem(core), change)
        return SchemeStep(update.potential, update.constraint_residual)


SCHEMES = {
    scheme.name: scheme
    for scheme in (IbiScheme, RelativeScheme, IhncScheme, HncnScheme,
                   LwrScheme, PyvScheme, HncgnScheme)
}


def make_scheme(target, state, config):
    """Instantiate the scheme class named by config.name."""
    return SCHEMES[config.name](target, state, config)
