"""
=============================================================================
Reference Potentials and Thermodynamic Diagnostics
=============================================================================

Lennard-Jones reference potentials:

    u_LJ(r) = 4 eps ((sigma/r)^12 - (sigma/r)^6)
    u_ts(r) = u_LJ(r) - u_LJ(r_c)  for r < r_c,   0 for r >= r_c

Diagnostics that only need (u, g) on the grid:

    virial pressure     p = rho0/beta - (2/3) pi rho0^2 int u'(r) g(r) r^3 dr
    Kirkwood-Buff       rho0 kappa_T / beta = 1 + 4 pi rho0 int h(r) r^2 dr = S(0)

Reduced units (eps = sigma = k_B = 1) are the default.

=============================================================================
"""

from dataclasses import dataclass

import numpy as np

from apps.core.exceptions import ConfigError
from apps.core.grids import POTENTIAL, Tabulated


@dataclass(frozen=True)
class LjParams:
    """Lennard-Jones energy and length scales, plus the truncation radius."""

    epsilon: float = 1.0
    sigma: float = 1.0
    cutoff: float = 2.5

    def __post_init__(self):
        for name in ('epsilon', 'sigma', 'cutoff'):
            if not getattr(self, name) > 0:
                raise ConfigError(f'Lennard-Jones {name} must be positive')


def lj(r, params=LjParams()):
    """Full Lennard-Jones potential; r may be a scalar or an array."""
    ratio6 = (params.sigma / np.asarray(r, dtype=float)) ** 6
    return 4.0 * params.epsilon * (ratio6 * ratio6 - ratio6)


def truncated_shifted_lj(r, params=LjParams()):
    """Lennard-Jones shifted to zero at r_c and cut off beyond it."""
    r = np.asarray(r, dtype=float)
    shifted = lj(r, params) - lj(params.cutoff, params)
    return np.where(r < params.cutoff, shifted, 0.0)


def reference_potential(grid, params=LjParams(), truncated=True):
    """Tabulate a Lennard-Jones reference on the potential subgrid."""
    function = truncated_shifted_lj if truncated else lj
    return Tabulated(grid, function(grid.potential_points, params), POTENTIAL)


def virial_pressure_quadrature(u, g, state):
    """
    Virial pressure of the ensemble described by (u, g).

    Each grid interval contributes its finite-difference slope of u times
    the trapezoid average of g times the exact r^3 moment
    (r_{i+1}^4 - r_i^4) / 4; u is zero beyond r_n.
    """
    rho = state.density
    r = g.grid.points
    u_full = u.full()
    g_full = g.full()
    slopes = np.diff(u_full) / g.grid.spacing
    g_mean = 0.5 * (g_full[:-1] + g_full[1:])
    moments = 0.25 * (r[1:] ** 4 - r[:-1] ** 4)
    with np.errstate(invalid='ignore', over='ignore'):
        terms = np.where(g_mean > 0, slopes * g_mean * moments, 0.0)
    integral = np.sum(terms)
    return rho / state.beta - (2.0 / 3.0) * np.pi * rho * rho * integral


def kirkwood_buff_compressibility(g, state):
    """rho0 kappa_T / beta from the Kirkwood-Buff integral (equals S(0))."""
    r = g.grid.points
    h = g.full() - 1.0
    integral = 4.0 * np.pi * g.grid.spacing * np.sum(r * r * h)
    return 1.0 + state.density * integral
