"""
=============================================================================
Inversion Diagnostics and Shared Building Blocks
=============================================================================

Error measures reported for every iterate:

    data fit     ||G(u_k) - g||_inf / ||G(u_0) - g||_inf      (all m points)
    epsilon      ( dr sum_i g(r_i) (u(r_i) - u_ref(r_i))^2 r_i^2 )^(1/2)
    sup norm     max_j (1 + r_j^2)^(alpha/2) |f(r_j)|

Building blocks shared by the update rules:

    pmf_initial_guess            u_0 = -(1/beta) log g
    antiderivative_matrix        v = A_0 w is piecewise linear, v(r_n) = 0,
                                 slope -w_i on (r_i, r_{i+1})
    pressure_constraint_vector   l with  p(u + A_0 w) = p(u) + l^T w  under
                                 the virial quadrature

=============================================================================
"""

import numpy as np

from apps.core.grids import DEFAULT_CORE_THRESHOLD, detect_core_region, finalize_potential


def error_metric(u_tilde, u_ref, g):
    """Weighted L2 distance between two potentials on the subgrid."""
    if u_tilde.grid != u_ref.grid or u_tilde.grid != g.grid:
        raise ValueError('potentials and RDF live on different grids')
    n = u_tilde.grid.n
    r = u_tilde.radii
    difference = u_tilde.values - u_ref.values
    total = u_tilde.grid.spacing * np.sum(g.values[:n] * difference ** 2 * r ** 2)
    return float(np.sqrt(total))


def sup_deviation(g_k, g):
    return float(np.max(np.abs(g_k.values - g.values)))


def data_fit(g_k, g, g0_fit):
    """
    Relative sup-norm misfit over all m data points.

    When the initial guess already reproduces the data (g0_fit = 0) the
    absolute deviation is returned instead.
    """
    deviation = sup_deviation(g_k, g)
    if g0_fit == 0:
        return deviation
    return deviation / g0_fit


def weighted_sup_norm(f, alpha=4.0):
    """Norm of the pair-correlation space; alpha > 3 keeps h integrable."""
    r = f.grid.points[:len(f.values)]
    return float(np.max((1.0 + r * r) ** (alpha / 2.0) * np.abs(f.values)))


def pmf_initial_guess(g, beta, threshold=DEFAULT_CORE_THRESHOLD):
    """Potential of mean force, core-extrapolated and tail-shifted."""
    core = detect_core_region(g, g, threshold)
    n = g.grid.n
    with np.errstate(divide='ignore'):
        raw = -np.log(g.values[:n]) / beta
    return finalize_potential(g.grid, raw, core)


def antiderivative_matrix(grid):
    """
    The m x (n-1) matrix A_0: A_ij = dr for i <= j < n, last potential row
    and every row beyond r_n zero.
    """
    n = grid.n
    if n < 2:
        raise ValueError('the antiderivative needs at least two potential points')
    matrix = np.zeros((grid.m, n - 1))
    matrix[:n - 1] = grid.spacing * np.triu(np.ones((n - 1, n - 1)))
    return matrix


def pressure_constraint_vector(g, state):
    """
    l_i = (2/3) pi rho0^2 (g(r_i) + g(r_{i+1}))/2 (r_{i+1}^4 - r_i^4)/4,
    i = 1..n-1.
    """
    n = g.grid.n
    r = g.grid.points[:n]
    values = g.values[:n]
    g_mean = 0.5 * (values[:-1] + values[1:])
    moments = 0.25 * (r[1:] ** 4 - r[:-1] ** 4)
    return (2.0 / 3.0) * np.pi * state.density ** 2 * g_mean * moments
