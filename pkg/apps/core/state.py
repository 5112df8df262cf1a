"""
=============================================================================
State Points
=============================================================================

A state point fixes the thermodynamics an RDF belongs to: number density
rho0, temperature T (beta = 1 / (k_B T)) and, for simulations, the particle
count N. Reduced units (k_B = 1) are the default; physical-unit runs pass
their own Boltzmann constant.

=============================================================================
"""

from dataclasses import dataclass

from .exceptions import ConfigError


@dataclass(frozen=True)
class StatePoint:
    """Density, temperature and particle count of an ensemble."""

    density: float
    temperature: float
    particles: int = 2
    boltzmann: float = 1.0

    def __post_init__(self):
        # rho0 = 0 is allowed: it is the ideal-gas limit the update rules
        # degenerate to. Simulations check rho0 > 0 themselves.
        if self.density < 0:
            raise ConfigError(f'density must be nonnegative, got {self.density}')
        if not self.temperature > 0:
            raise ConfigError(f'temperature must be positive, got {self.temperature}')
        if self.particles < 2:
            raise ConfigError(f'need at least two particles, got {self.particles}')
        if not self.boltzmann > 0:
            raise ConfigError(f'Boltzmann constant must be positive, got {self.boltzmann}')

    @property
    def beta(self):
        return 1.0 / (self.boltzmann * self.temperature)

    @property
    def kt(self):
        return self.boltzmann * self.temperature

    @property
    def box_length(self):
        """Edge of the cubic periodic box holding N particles at rho0."""
        return (self.particles / self.density) ** (1.0 / 3.0)
