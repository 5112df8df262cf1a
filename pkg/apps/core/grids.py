"""
=============================================================================
Radial Grids and Tabulated Functions
=============================================================================

Every function in the toolkit (pair potentials, radial distribution
functions, correlation functions) is sampled on an equidistant radial grid

    r_j = j * dr,   j = 1..m

Potentials live on the first n <= m points only and are taken to be exactly
zero for r > r_n. RDFs and correlation functions use all m points.

Core region:
    Sampled RDFs vanish at short distances. The core index j0 marks the last
    grid point where either of two RDFs is below a threshold; potentials are
    continued into the core with a power law a' r^(-alpha') fitted just
    outside it.

Everything here is a pure function on immutable inputs.

=============================================================================
"""

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .exceptions import ConfigError, CoreFitFailure, DegenerateRdf

# ----- Table kinds -----
POTENTIAL = 'potential'
RDF = 'rdf'
CORRELATION = 'correlation'
GENERIC = 'generic'

KIND_CHOICES = (POTENTIAL, RDF, CORRELATION, GENERIC)

DEFAULT_CORE_THRESHOLD = 1e-6

# Number of points just outside the core used for the power-law fit
CORE_FIT_WINDOW = 5


@dataclass(frozen=True)
class RadialGrid:
    """
    Equidistant radial mesh r_j = j * spacing, j = 1..m.

    The first n points form the potential subgrid; r_n is the potential
    cutoff.
    """

    spacing: float
    m: int
    n: int

    def __post_init__(self):
        if not self.spacing > 0:
            raise ConfigError(f'grid spacing must be positive, got {self.spacing}')
        if self.n < 1 or self.m < 1:
            raise ConfigError(f'grid needs at least one point (m={self.m}, n={self.n})')
        if self.n > self.m:
            raise ConfigError(f'potential points n={self.n} exceed RDF points m={self.m}')

    @property
    def points(self):
        """All m radii."""
        return np.arange(1, self.m + 1) * self.spacing

    @property
    def potential_points(self):
        """The first n radii (the potential subgrid)."""
        return np.arange(1, self.n + 1) * self.spacing

    @property
    def cutoff(self):
        """r_n: potentials vanish beyond this radius."""
        return self.n * self.spacing

    @property
    def r_max(self):
        """r_m: the last RDF sample."""
        return self.m * self.spacing


@dataclass(frozen=True)
class CoreRegion:
    """Core index j0: both RDFs exceed the threshold for every j > j0."""

    index: int

    def radius(self, grid):
        return self.index * grid.spacing


@dataclass(frozen=True, eq=False)
class Tabulated:
    """
    A real function sampled on a RadialGrid.

    Potentials hold n values, every other kind holds m values. The value
    array is made read-only so a table can be shared freely.
    """

    grid: RadialGrid
    values: np.ndarray
    kind: str = GENERIC

    def __post_init__(self):
        if self.kind not in KIND_CHOICES:
            raise ValueError(f'unknown table kind {self.kind!r}')
        values = np.array(self.values, dtype=float)
        expected = self.grid.n if self.kind == POTENTIAL else self.grid.m
        if values.shape != (expected,):
            raise ValueError(
                f'{self.kind} table needs {expected} values, got shape {values.shape}'
            )
        if self.kind == RDF and np.any(values < 0):
            raise ValueError('radial distribution function has negative values')
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @property
    def radii(self):
        return self.grid.points[:len(self.values)]

    def full(self):
        """Values on all m grid points; potentials are padded with zeros."""
        if len(self.values) == self.grid.m:
            return np.array(self.values)
        padded = np.zeros(self.grid.m)
        padded[:len(self.values)] = self.values
        return padded

    def replace(self, values, kind=None):
        """A new table on the same grid with other values."""
        return Tabulated(self.grid, values, kind or self.kind)


def make_grid(spacing, m, n):
    """Build the radial grid; rejects n > m and nonpositive spacing."""
    return RadialGrid(float(spacing), int(m), int(n))


def detect_core_region(g, g_k, threshold=DEFAULT_CORE_THRESHOLD):
    """
    Smallest j0 such that min(g, g_k) > threshold at every r_j with j > j0.

    Raises DegenerateRdf when the RDFs never clear the threshold at the end
    of the grid.
    """
    if g.grid != g_k.grid:
        raise ValueError('RDFs live on different grids')
    low = np.minimum(g.values, g_k.values) <= threshold
    below = np.flatnonzero(low)
    if below.size == 0:
        return CoreRegion(0)
    index = int(below[-1]) + 1
    if index >= g.grid.m:
        raise DegenerateRdf(f'RDF is below {threshold:g} up to the last grid point')
    return CoreRegion(index)


def extrapolate_core(u, core):
    """
    Replace the potential inside the core by a' r^(-alpha').

    (a', alpha') come from a least squares line through (log r, log u) over
    the first few points beyond the core. Values outside the core are
    returned untouched.
    """
    j0 = core.index
    if j0 == 0:
        return u
    n = len(u.values)
    width = min(CORE_FIT_WINDOW, n - j0)
    if width < 2:
        raise CoreFitFailure(
            f'core radius index {j0} leaves {max(width, 0)} fit point(s) on the potential grid'
        )
    r = u.radii
    window_r = r[j0:j0 + width]
    window_u = u.values[j0:j0 + width]
    if not np.all(np.isfinite(window_u)) or np.any(window_u <= 0):
        raise CoreFitFailure(
            f'potential is not positive next to the core (r = {window_r[0]:g})'
        )
    slope, intercept = np.polyfit(np.log(window_r), np.log(window_u), 1)
    alpha = -slope
    if alpha <= 0:
        raise CoreFitFailure(f'fitted core exponent {alpha:g} is not positive')
    values = np.array(u.values)
    values[:j0] = np.exp(intercept) * r[:j0] ** (-alpha)
    return u.replace(values)


def shift_to_zero_tail(u):
    """Shift a potential by a constant so that u(r_n) = 0."""
    return u.replace(u.values - u.values[-1])


def finalize_potential(grid, values, core):
    """
    Turn raw potential values on the subgrid into a normalized table.

    Values inside the core are discarded and continued by the power-law
    fit, then the table is shifted so that u(r_n) = 0.
    """
    if core.index >= grid.n:
        raise DegenerateRdf(
            f'core region reaches r = {core.radius(grid):g}, beyond the potential cutoff'
        )
    values = np.array(values, dtype=float)
    values[:core.index] = np.nan
    u = Tabulated(grid, values, POTENTIAL)
    return shift_to_zero_tail(extrapolate_core(u, core))


def refine_tenfold(u):
    """
    Interpolate a potential onto spacing dr/10 over (0, r_n].

    Cubic not-a-knot spline; the original nodes are copied over so the
    refinement is the identity there.
    """
    grid = u.grid
    n = len(u.values)
    fine = RadialGrid(grid.spacing / 10.0, 10 * n, 10 * n)
    if n == 1:
        values = np.full(fine.n, u.values[0])
    else:
        spline = CubicSpline(u.radii, u.values, bc_type='not-a-knot')
        values = spline(fine.points)
        values[9::10] = u.values
    return Tabulated(fine, values, POTENTIAL)
