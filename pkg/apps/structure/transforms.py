"""
=============================================================================
Radial Fourier Transforms
=============================================================================

Three-dimensional Fourier transform of a radially symmetric function,

    f_hat(w) = (2/w)  integral r f(r) sin(2 pi w r) dr
    f(r)     = (2/r)  integral w f_hat(w) sin(2 pi r w) dw

discretised with the trapezoidal rule on the grid r_j = j dr (f = 0 beyond
r_m). Evaluated on the frequency ladder

    w_l = l / (2 (m+1) dr),   l = 1..m

both sums are type-I discrete sine transforms of length m, which equals an
FFT of length 2(m+1) applied to the odd extension of r f(r). With this
ladder the discrete pair is an exact inverse:

    radial_fft_inverse(radial_fft_forward(f)) == f   (to rounding)

The w = 0 limit 4 pi dr sum r_j^2 f(r_j) is kept next to the ladder values
because the structure factor check needs S(0).

=============================================================================
"""

from dataclasses import dataclass

import numpy as np
from scipy.fft import dst

from apps.core.grids import GENERIC, RadialGrid, Tabulated
from apps.core.tables import ladder_spacing, read_table, write_table


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Values on the frequency ladder of `grid`, plus the w = 0 limit."""

    grid: RadialGrid
    values: np.ndarray
    zero_limit: float = float('nan')

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.grid.m,):
            raise ValueError(f'spectral field needs {self.grid.m} values, got {values.shape}')
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @property
    def frequencies(self):
        return frequency_ladder(self.grid)

    def replace(self, values, zero_limit=float('nan')):
        return SpectralField(self.grid, values, zero_limit)


def frequency_step(grid):
    """Spacing of the ladder: 1 / (2 (m+1) dr)."""
    return 1.0 / (2.0 * (grid.m + 1) * grid.spacing)


def frequency_ladder(grid):
    """w_l = l / (2 (m+1) dr), l = 1..m."""
    return np.arange(1, grid.m + 1) * frequency_step(grid)


def radial_fft_forward(f):
    """Trapezoidal 3D radial Fourier transform of a table on all m points."""
    grid = f.grid
    r = grid.points
    values = f.full()
    omega = frequency_ladder(grid)
    transformed = grid.spacing / omega * dst(r * values, type=1)
    zero_limit = 4.0 * np.pi * grid.spacing * np.sum(r * r * values)
    return SpectralField(grid, transformed, float(zero_limit))


def radial_fft_inverse(field, kind=GENERIC):
    """Inverse transform from the frequency ladder back onto the grid."""
    grid = field.grid
    r = grid.points
    omega = frequency_ladder(grid)
    values = frequency_step(grid) / r * dst(omega * field.values, type=1)
    return Tabulated(grid, values, kind)


def transform_matrices(grid):
    """
    Dense forward and inverse transform matrices (F, F^-1).

    F maps [f(r_j)] onto [f_hat(w_l)]; F^-1 is the inverse sum. Only used
    where a matrix representation is needed (Gauss-Newton, cross-checks).
    """
    r = grid.points
    omega = frequency_ladder(grid)
    index = np.arange(1, grid.m + 1)
    sines = np.sin(np.pi * np.outer(index, index) / (grid.m + 1))
    forward = (2.0 * grid.spacing / omega)[:, None] * sines * r[None, :]
    inverse = (2.0 * frequency_step(grid) / r)[:, None] * sines * omega[None, :]
    return forward, inverse


# ----- Text export / import -----

def save_spectral(path, field, header=None):
    """Write (w, value) rows; the w = 0 limit goes first when it is known."""
    omega = field.frequencies
    values = field.values
    if np.isfinite(field.zero_limit):
        omega = np.concatenate(([0.0], omega))
        values = np.concatenate(([field.zero_limit], values))
    write_table(path, omega, values, header=header)


def load_spectral(path):
    """
    Read a spectral table written by save_spectral.

    The real-space grid is recovered from the ladder: dr = 1 / (2 (m+1) dw).
    """
    omega, values = read_table(path)
    zero_limit = float('nan')
    if omega[0] == 0.0:
        zero_limit = float(values[0])
        omega, values = omega[1:], values[1:]
    step = ladder_spacing(path, omega)
    m = len(omega)
    grid = RadialGrid(1.0 / (2.0 * (m + 1) * step), m, m)
    return SpectralField(grid, values, zero_limit)
