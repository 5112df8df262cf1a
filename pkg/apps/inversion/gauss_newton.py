"""
=============================================================================
Hypernetted-Chain Gauss-Newton Subproblem
=============================================================================

The update u_{k+1} = u_k + A_0 w is chosen by linear least squares:

    minimize   || W (g - g_k - U^-1 A_0 w) ||_2
    subject to l^T w = p - p_k          (only with a pressure target)

where U = (1/beta) (T - D^-1), D = diag(g), is the linearised HNC map at
the target g, restricted to the nodes outside the core. Only intervals
outside the core carry unknowns; the core is re-extrapolated afterwards.

Solution path:
    1. factor U once (dense LU) and form B = U^-1 A_0
    2. with a constraint, eliminate w_i0 with i0 = argmax |l_i|
    3. solve the reduced problem through its normal equations; a badly
       conditioned Gram matrix gets lambda I added,
       lambda = 1e-10 * trace / size
       The reduced problem is always damped with
       lambda = 1e-4 * ||B_reduced||_2^2; near the core g is tiny and the
       reduced columns there are nearly multiples of the eliminated one
    4. back-substitute w_i0 so that l^T w = p - p_k holds exactly

=============================================================================
"""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from apps.core.exceptions import ConstraintInfeasible, DegenerateRdf, SingularNormalEquations
from apps.core.grids import Tabulated, finalize_potential
from apps.structure.oz import assemble_T_matrix

from .diagnostics import antiderivative_matrix, pressure_constraint_vector

logger = logging.getLogger(__name__)

MAX_CONDITION = 1e12
REGULARIZATION = 1e-10
# Damping of the reduced (pressure-constrained) problem, relative to the
# largest eigenvalue of its Gram matrix
CONSTRAINED_DAMPING = 1e-4


def solve_normal_equations(design, rhs, damping=0.0):
    """
    Least squares solution of design @ x ~ rhs via the Gram matrix.

    With damping > 0 the Gram matrix is shifted by damping times its largest
    eigenvalue, i.e. || design x - rhs ||^2 + lambda || x ||^2 is minimized.
    """
    if design.shape[1] == 0:
        return np.zeros(0)
    gram = design.T @ design
    moment = design.T @ rhs
    if damping > 0:
        gram = gram + damping * np.linalg.norm(design, 2) ** 2 * np.eye(len(gram))
    condition = np.linalg.cond(gram)
    if not np.isfinite(condition) or condition > MAX_CONDITION:
        shift = REGULARIZATION * np.trace(gram) / len(gram)
        if not shift > 0:
            raise SingularNormalEquations('Gram matrix of the Gauss-Newton step vanishes')
        logger.warning('Gram matrix condition %.3e > %.0e; regularizing with lambda = %.3e',
                       condition, MAX_CONDITION, shift)
        gram = gram + shift * np.eye(len(gram))
    try:
        solution = scipy.linalg.solve(gram, moment, assume_a='pos')
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SingularNormalEquations(f'normal equations cannot be solved: {exc}') from exc
    if not np.all(np.isfinite(solution)):
        raise SingularNormalEquations('normal equations produced non-finite values')
    return solution


class GaussNewtonSubproblem:
    """
    Least squares model of one HNCGN step for a fixed target and core.

    The expensive parts (T, the LU factors of U and B = U^-1 A_0) depend
    only on the target RDF and the core index, so one instance serves every
    iteration that shares the core.
    """

    def __init__(self, oz, core, weight_exponent=0.0):
        grid = oz.grid
        self.grid = grid
        self.core = core
        start = core.index
        if start >= grid.n - 1:
            raise DegenerateRdf(
                f'core region reaches r = {core.radius(grid):g}; no potential intervals are left'
            )
        self.nodes = slice(start, grid.m)
        target = oz.rdf.values[self.nodes]

        correction = assemble_T_matrix(oz)[self.nodes, self.nodes]
        linearized = (correction - np.diag(1.0 / target)) / oz.state.beta
        factors = scipy.linalg.lu_factor(linearized)
        if np.any(np.diag(factors[0]) == 0) or not np.all(np.isfinite(factors[0])):
            raise SingularNormalEquations('linearised HNC map is singular on the non-core nodes')

        self.antiderivative = antiderivative_matrix(grid)
        self.basis = scipy.linalg.lu_solve(factors, self.antiderivative[start:, start:])
        radii = grid.points[self.nodes]
        self.weights = (1.0 + radii * radii) ** weight_exponent
        self.target = target
        self.constraint = pressure_constraint_vector(oz.rdf, oz.state)[start:]

    @property
    def unknowns(self):
        return self.basis.shape[1]

    def misfit(self, g_k):
        return self.target - g_k.values[self.nodes]

    def residual(self, g_k, w):
        """|| W (g - g_k - B w) ||_2 for a reduced step w."""
        return float(np.linalg.norm(self.weights * (self.misfit(g_k) - self.basis @ w)))

    def solve(self, g_k, pressure_change=None):
        """Optimal reduced step; with pressure_change the constraint is exact."""
        design = self.weights[:, None] * self.basis
        rhs = self.weights * self.misfit(g_k)
        if pressure_change is None:
            return solve_normal_equations(design, rhs)

        constraint = self.constraint
        pivot = int(np.argmax(np.abs(constraint)))
        if constraint[pivot] == 0:
            if pressure_change != 0:
                raise ConstraintInfeasible(
                    f'pressure constraint vector vanishes but p - p_k = {pressure_change:g}'
                )
            return solve_normal_equations(design, rhs)

        others = np.arange(len(constraint)) != pivot
        column = design[:, pivot]
        ratio = constraint[others] / constraint[pivot]
        reduced = design[:, others] - np.outer(column, ratio)
        shifted = rhs - column * (pressure_change / constraint[pivot])
        free = solve_normal_equations(reduced, shifted, damping=CONSTRAINED_DAMPING)

        w = np.empty(len(constraint))
        w[others] = free
        w[pivot] = (pressure_change - constraint[others] @ free) / constraint[pivot]
        return w

    def expand(self, w):
        """Full step on all n-1 intervals; core intervals carry zero."""
        full = np.zeros(self.grid.n - 1)
        full[self.core.index:] = w
        return full

    def potential_change(self, w):
        """A_0 w on the potential subgrid for a reduced step w."""
        return self.antiderivative[:self.grid.n] @ self.expand(w)


@dataclass(frozen=True, eq=False)
class GaussNewtonUpdate:
    potential: Tabulated
    step: np.ndarray
    constraint_residual: float


def gauss_newton_update(u_k, g_k, subproblem, pressure_change=None):
    """Apply the optimal step and re-extrapolate the core."""
    w = subproblem.solve(g_k, pressure_change)
    values = u_k.values + subproblem.potential_change(w)
    potential = finalize_potential(u_k.grid, values, subproblem.core)
    residual = float('nan')
    if pressure_change is not None:
        residual = float(subproblem.constraint @ w - pressure_change)
    return GaussNewtonUpdate(potential, w, residual)
