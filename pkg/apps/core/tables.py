"""
=============================================================================
Table Files - The Interchange Format for Every Input and Output
=============================================================================

A table file is whitespace-separated two-column text:

    # comment lines start with '#'
    0.02  1.234e-05
    0.04  3.1e-03
    ...

The first column (radius, or frequency for spectral tables) must be
strictly increasing. Values are written with 17 significant digits so a
table re-parses into exactly the same floats.

=============================================================================
"""

from pathlib import Path

import numpy as np

from .exceptions import TableFormatError
from .grids import POTENTIAL, RadialGrid, Tabulated


def read_table(path):
    """Parse a two-column table file into (x, y) arrays."""
    path = Path(path)
    xs, ys = [], []
    try:
        handle = path.open()
    except OSError as exc:
        raise TableFormatError(path, 0, exc.strerror) from None
    with handle:
        for lineno, line in enumerate(handle, start=1):
            text = line.strip()
            if not text or text.startswith('#'):
                continue
            parts = text.split()
            if len(parts) != 2:
                raise TableFormatError(path, lineno, f'expected two columns, got {len(parts)}')
            try:
                x, y = float(parts[0]), float(parts[1])
            except ValueError:
                raise TableFormatError(path, lineno, f'not a number in {text!r}') from None
            if xs and x <= xs[-1]:
                raise TableFormatError(path, lineno, 'first column must be strictly increasing')
            xs.append(x)
            ys.append(y)
    if not xs:
        raise TableFormatError(path, 0, 'no data rows')
    return np.array(xs), np.array(ys)


def write_table(path, x, y, header=None):
    """Write two columns; `header` lines become '#' comments."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, np.column_stack((x, y)), fmt='%.17g', header=header or '')


def ladder_spacing(path, x):
    """
    Spacing of an equidistant ladder x_j = j * dx, j = 1..len(x).

    Used for radial grids and for frequency ladders alike.
    """
    if len(x) == 0:
        raise TableFormatError(path, 0, 'no grid rows')
    spacing = x[0]
    expected = np.arange(1, len(x) + 1) * spacing
    if spacing <= 0 or not np.allclose(x, expected, rtol=1e-9, atol=0.0):
        raise TableFormatError(path, 0, 'first column is not an equidistant grid j*dx, j = 1..m')
    return float(spacing)


def load_tabulated(path, kind, grid=None):
    """
    Read a table file as a Tabulated function.

    Without `grid` the grid is inferred from the file (m = n = rows). With
    `grid` the file must match it: n rows for potentials, m rows otherwise.
    """
    x, y = read_table(path)
    spacing = ladder_spacing(path, x)
    if grid is None:
        grid = RadialGrid(spacing, len(x), len(x))
    else:
        expected = grid.n if kind == POTENTIAL else grid.m
        if len(x) != expected or not np.isclose(spacing, grid.spacing, rtol=1e-9):
            raise TableFormatError(
                path, 0,
                f'expected {expected} rows with spacing {grid.spacing:g}, '
                f'got {len(x)} rows with spacing {spacing:g}',
            )
    try:
        return Tabulated(grid, y, kind)
    except ValueError as exc:
        raise TableFormatError(path, 0, str(exc)) from None


def save_tabulated(path, table, header=None):
    """Write a Tabulated function as (r, value) rows."""
    write_table(path, table.radii, table.values, header=header)
