"""
=============================================================================
Core Exceptions - One Hierarchy for Every Failure the Toolkit Reports
=============================================================================

Library code raises these; management commands turn them into
CommandError(message, returncode=exc.exit_code) so the process exits with
a code that tells the caller what went wrong:

    1   numerical failure (degenerate data, failed fits, blow-ups)
    2   config or input error
    3   no convergence
    4   singular structure factor
    5   RDF range exceeds the simulation box
    6   no runs found

Programming errors (mismatched grids, wrong array lengths) stay ValueError.

=============================================================================
"""


class HendersonError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


# ----- Input / configuration -----

class ConfigError(HendersonError):
    """A run configuration is malformed or inconsistent."""

    exit_code = 2


class TableFormatError(ConfigError):
    """A two-column table file cannot be parsed."""

    def __init__(self, path, line, message):
        self.path = path
        self.line = line
        super().__init__(f'{path}:{line}: {message}')


class NoRuns(HendersonError):
    """A run directory holds no iteration history."""

    exit_code = 6


# ----- Numerical failures -----

class NoConvergence(HendersonError):
    """An iterative solver ran out of iterations."""

    exit_code = 3

    def __init__(self, message, iterations=None, residual=None):
        self.iterations = iterations
        self.residual = residual
        super().__init__(message)


class SingularStructureFactor(HendersonError):
    """S(omega) = 1 + rho0 * h_hat(omega) dropped to (or below) the floor."""

    exit_code = 4

    def __init__(self, message, frequency=None, value=None):
        self.frequency = frequency
        self.value = value
        super().__init__(message)


class DegenerateRdf(HendersonError):
    """The RDF vanishes on the whole range where a potential is needed."""


class CoreFitFailure(HendersonError):
    """The power-law continuation into the core region cannot be fitted."""


class CavityUnderflow(HendersonError):
    """The cavity function g*exp(beta*u) is numerically zero where needed."""


class SingularNormalEquations(HendersonError):
    """The Gauss-Newton normal equations cannot be solved."""


class ConstraintInfeasible(HendersonError):
    """The pressure constraint has a zero row but a nonzero right-hand side."""


class RdfRangeExceedsBox(HendersonError):
    """The RDF grid reaches beyond half the periodic box length."""

    exit_code = 5


class BlowUp(HendersonError):
    """A molecular dynamics run became unstable."""
