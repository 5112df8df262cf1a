"""
=============================================================================
Ornstein-Zernike Machinery and the Hypernetted-Chain Closure
=============================================================================

For an RDF g at density rho0 (h = g - 1):

    structure factor     S(w) = 1 + rho0 h_hat(w)             (must stay > 0)
    OZ relation          c + rho0 h*c = h    <=>   c_hat = h_hat / S
    HNC closure          g = exp(-beta u + h - c)
    HNC potential map    U(g) = -(1/beta) log g + (1/beta) (h - c)

Linearising U at g gives the correction operator

    T = (I + A)^-2 (2I + A) A,      A f = rho0 h * f

which is diagonal on the frequency ladder with symbol

    t(w) = (2 + rho0 h_hat) rho0 h_hat / (1 + rho0 h_hat)^2

Both the spectral route (apply_T) and the dense matrix F^-1 diag(t) F
(assemble_T_matrix) are provided.

The HNC forward solver is a Picard iteration on the indirect correlation
gamma = h - c with linear mixing:

    gamma -> c = exp(-beta u + gamma) - 1 - gamma
          -> gamma_hat = rho0 c_hat^2 / (1 - rho0 c_hat)   (OZ)
          -> gamma_new, mixed back into gamma

Starting from gamma = 0 at liquid densities the first OZ step can make
1 - rho0 c_hat vanish; the solver then continues in the density from zero.

=============================================================================
"""

import logging
from dataclasses import dataclass

import numpy as np

from apps.core.exceptions import NoConvergence, SingularStructureFactor
from apps.core.grids import (
    CORRELATION, DEFAULT_CORE_THRESHOLD, RDF, Tabulated, detect_core_region,
    finalize_potential,
)
from apps.core.state import StatePoint

from .transforms import (
    SpectralField, radial_fft_forward, radial_fft_inverse, transform_matrices,
)

logger = logging.getLogger(__name__)

DEFAULT_S_MIN = 1e-8
DEFAULT_MIX = 0.15
DEFAULT_TOLERANCE = 1e-10
DEFAULT_MAX_ITERATIONS = 10000

# Cold-start density ramp: initial number of stages, the smallest increment
# (as a fraction of rho0) before giving up, and the tolerance of the
# intermediate stages
RAMP_STAGES = 8
RAMP_MIN_FRACTION = 1.0 / 1024
RAMP_TOLERANCE = 1e-6
# Mixing is halved after a diverging stage, down to this fraction of the
# configured value
RAMP_MIN_MIX_FRACTION = 1.0 / 16


@dataclass(frozen=True, eq=False)
class OzContext:
    """An RDF at a state point, with h_hat and the structure factor."""

    state: StatePoint
    rdf: Tabulated
    h_hat: SpectralField
    structure_factor: np.ndarray
    structure_factor_zero: float

    @property
    def grid(self):
        return self.rdf.grid

    @property
    def c_hat(self):
        """Direct correlation on the frequency ladder: h_hat / S."""
        return self.h_hat.values / self.structure_factor


def make_oz_context(g, state, s_min=DEFAULT_S_MIN):
    """
    Transform h = g - 1 and check that the structure factor stays positive.

    Raises SingularStructureFactor when S(w_l) <= s_min for some l or at
    w = 0; this flags data near a phase transition.
    """
    h = g.replace(g.values - 1.0, kind=CORRELATION)
    h_hat = radial_fft_forward(h)
    structure = 1.0 + state.density * h_hat.values
    structure_zero = 1.0 + state.density * h_hat.zero_limit
    if structure_zero <= s_min:
        raise SingularStructureFactor(
            f'S(0) = {structure_zero:.3e} is not above {s_min:g}', 0.0, structure_zero
        )
    bad = np.flatnonzero(structure <= s_min)
    if bad.size:
        first = bad[0]
        omega = h_hat.frequencies[first]
        raise SingularStructureFactor(
            f'S({omega:.4g}) = {structure[first]:.3e} is not above {s_min:g}',
            omega, structure[first],
        )
    structure.setflags(write=False)
    return OzContext(state, g, h_hat, structure, float(structure_zero))


def direct_correlation(ctx):
    """c from the OZ relation, c_hat = h_hat / (1 + rho0 h_hat)."""
    return radial_fft_inverse(ctx.h_hat.replace(ctx.c_hat), kind=CORRELATION)


def _symbol(x):
    return (2.0 + x) * x / (1.0 + x) ** 2


def t_symbol(ctx):
    """Symbol t(w_l) of the correction operator T."""
    rho = ctx.state.density
    values = _symbol(rho * ctx.h_hat.values)
    zero = _symbol(rho * ctx.h_hat.zero_limit)
    return ctx.h_hat.replace(values, float(zero))


def apply_T(ctx, f):
    """phi = T f via forward transform, multiplication by t, inverse transform."""
    f_hat = radial_fft_forward(f)
    product = f_hat.replace(t_symbol(ctx).values * f_hat.values)
    return radial_fft_inverse(product)


def assemble_spectral_operator(grid, symbol):
    """Dense m x m matrix F^-1 diag(symbol) F for any symbol on the ladder."""
    forward, inverse = transform_matrices(grid)
    return inverse @ (np.asarray(symbol)[:, None] * forward)


def assemble_T_matrix(ctx):
    """Matrix form of T; T @ (g - g_k) gives phi_k on the whole grid."""
    return assemble_spectral_operator(ctx.grid, t_symbol(ctx).values)


def hnc_map(ctx):
    """
    U(g) on all m grid points, without core or tail processing.

    Where g vanishes the value is +inf.
    """
    g = ctx.rdf.values
    beta = ctx.state.beta
    c = direct_correlation(ctx).values
    with np.errstate(divide='ignore'):
        return (-np.log(g) + (g - 1.0) - c) / beta


def hnc_potential(g, state, threshold=DEFAULT_CORE_THRESHOLD, s_min=DEFAULT_S_MIN):
    """HNC estimate of the pair potential, core-extrapolated and tail-shifted."""
    ctx = make_oz_context(g, state, s_min)
    core = detect_core_region(g, g, threshold)
    raw = hnc_map(ctx)
    return finalize_potential(g.grid, raw[:g.grid.n], core)


# =============================================================================
# HNC FORWARD SOLVER
# =============================================================================

@dataclass(frozen=True, eq=False)
class HncSolution:
    """Converged HNC state: the RDF plus the bookkeeping a report needs."""

    rdf: Tabulated
    gamma: np.ndarray
    iterations: int
    residual: float
    stages: int = 1


def _diverged(exc):
    if isinstance(exc, SingularStructureFactor):
        return True
    return exc.residual is not None and not np.isfinite(exc.residual)


class HncSolver:
    """
    Picard iteration with linear mixing for the HNC integral equation.

    One solver instance holds the state point and the iteration controls;
    solve() can be called with any potential on a compatible grid.

    A cold start (no initial gamma) first iterates at the requested density
    directly. If that loses positivity of the structure factor or does not
    converge, the density is raised in stages from zero instead, each stage
    warm-started from the previous one; a failed stage halves the density
    increment.
    """

    def __init__(self, state, mix=DEFAULT_MIX, tolerance=DEFAULT_TOLERANCE,
                 max_iterations=DEFAULT_MAX_ITERATIONS, s_min=DEFAULT_S_MIN):
        if not 0 < mix <= 1:
            raise ValueError(f'mixing parameter must lie in (0, 1], got {mix}')
        self.state = state
        self.mix = mix
        self.tolerance = tolerance
        self.max_iterations = max_iterations
        self.s_min = s_min

    def solve(self, u, initial_gamma=None):
        """Solve for g given the potential u (zero beyond r_n)."""
        with np.errstate(over='ignore'):
            boltzmann = np.exp(-self.state.beta * u.full())
        density = self.state.density
        if initial_gamma is not None:
            return self._iterate(u.grid, boltzmann, density, np.array(initial_gamma),
                                 self.tolerance)
        try:
            return self._iterate(u.grid, boltzmann, density, np.zeros(u.grid.m),
                                 self.tolerance)
        except (NoConvergence, SingularStructureFactor) as exc:
            if density <= 0:
                raise
            logger.info('Cold HNC start at rho0 = %g failed (%s); ramping the density',
                        density, exc)
        return self._ramp(u.grid, boltzmann)

    def _ramp(self, grid, boltzmann):
        target = self.state.density
        mix = self.mix
        step = target / RAMP_STAGES
        smallest = target * RAMP_MIN_FRACTION
        current = 0.0
        gamma = np.zeros(grid.m)
        iterations = 0
        stages = 0
        while True:
            trial = min(current + step, target)
            final = trial >= target
            tolerance = self.tolerance if final else max(self.tolerance, RAMP_TOLERANCE)
            try:
                solution = self._iterate(grid, boltzmann, trial, gamma, tolerance, mix)
            except (NoConvergence, SingularStructureFactor) as exc:
                step /= 2.0
                if step < smallest:
                    raise
                if _diverged(exc) and mix > self.mix * RAMP_MIN_MIX_FRACTION:
                    mix /= 2.0
                logger.debug('HNC stage at rho0 = %g failed; increment %g, mix %g',
                             trial, step, mix)
                continue
            iterations += solution.iterations
            stages += 1
            if final:
                logger.info('HNC converged after %d density stages (%d iterations)',
                            stages, iterations)
                return HncSolution(solution.rdf, solution.gamma, iterations,
                                   solution.residual, stages)
            current = trial
            gamma = solution.gamma

    def _iterate(self, grid, boltzmann, rho, gamma, tolerance, mix=None):
        mix = self.mix if mix is None else mix
        residual = np.inf
        for iteration in range(1, self.max_iterations + 1):
            g_old = boltzmann * np.exp(gamma)
            c = g_old - 1.0 - gamma
            c_hat = radial_fft_forward(Tabulated(grid, c, CORRELATION))
            denominator = 1.0 - rho * c_hat.values
            if np.any(denominator <= 0) or np.any(denominator >= 1.0 / self.s_min):
                first = int(np.flatnonzero(
                    (denominator <= 0) | (denominator >= 1.0 / self.s_min))[0])
                raise SingularStructureFactor(
                    f'structure factor lost positivity at iteration {iteration}',
                    c_hat.frequencies[first], 1.0 / denominator[first],
                )
            gamma_hat = c_hat.replace(rho * c_hat.values ** 2 / denominator)
            gamma_new = radial_fft_inverse(gamma_hat).values
            g_new = boltzmann * np.exp(gamma_new)
            residual = float(np.max(np.abs(g_new - g_old)))

            if not np.isfinite(residual):
                raise NoConvergence(
                    f'HNC iteration diverged at iteration {iteration}', iteration, residual
                )
            if residual <= tolerance:
                logger.debug('HNC converged in %d iterations at rho0 = %g (residual %.2e)',
                             iteration, rho, residual)
                return HncSolution(Tabulated(grid, g_new, RDF), gamma_new, iteration, residual)
            if iteration % 1000 == 0:
                logger.debug('HNC iteration %d: residual %.3e', iteration, residual)
            gamma = (1.0 - mix) * gamma + mix * gamma_new

        raise NoConvergence(
            f'HNC did not converge in {self.max_iterations} iterations '
            f'(residual {residual:.3e} > {tolerance:g})',
            self.max_iterations, residual,
        )


def hnc_forward_solve(u, state, mix=DEFAULT_MIX, tol=DEFAULT_TOLERANCE,
                      max_iter=DEFAULT_MAX_ITERATIONS):
    """RDF of the HNC closure for the potential u."""
    return HncSolver(state, mix, tol, max_iter).solve(u).rdf
