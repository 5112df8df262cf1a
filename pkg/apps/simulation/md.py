"""
=============================================================================
Canonical-Ensemble Molecular Dynamics
=============================================================================

The stochastic forward operator: N identical unit-mass particles in a cubic
periodic box of edge L = (N / rho0)^(1/3), interacting through a tabulated
pair potential. One run produces

    - the RDF histogram on the requested grid (bin width dr, bins centred
      on r_j), normalised with the finite-N pair count N (N-1) / 2
    - the virial pressure averaged over the same frames

Ingredients:
    - velocity Verlet integration
    - stochastic velocity rescaling thermostat (Bussi); a single global
      scale factor keeps total momentum at zero
    - forces from the tenfold-refined potential table, interpolated with a
      cubic spline; force = -derivative of the interpolant; zero beyond r_n
    - periodic KD-tree neighbour search (scipy.spatial.cKDTree, boxsize=L)

A run is a deterministic function of (u, state, params): all randomness
comes from one numpy Generator seeded with params.seed.

=============================================================================
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.spatial import cKDTree

from apps.core.exceptions import BlowUp, ConfigError, RdfRangeExceedsBox
from apps.core.grids import RDF, Tabulated, refine_tenfold

logger = logging.getLogger(__name__)

# Energies above SOFT_CORE_CAP * kT are continued linearly towards r = 0
SOFT_CORE_CAP = 1e3

# Kinetic energy above BLOWUP_FACTOR times its target aborts the run
BLOWUP_FACTOR = 1e3

PRESSURE_BLOCKS = 10


@dataclass(frozen=True)
class MdParams:
    """Integration, thermostat and sampling controls of one run."""

    timestep: float = 0.002
    equilibration_steps: int = 50000
    production_steps: int = 35000
    stride: int = 10
    thermostat_time: float = 0.2
    seed: int = 2019
    trajectory: Path = None

    def __post_init__(self):
        if not self.timestep > 0:
            raise ConfigError(f'timestep must be positive, got {self.timestep}')
        if self.stride < 1:
            raise ConfigError(f'sampling stride must be at least 1, got {self.stride}')
        if self.production_steps < self.stride:
            raise ConfigError('production steps must cover at least one sampling stride')
        if self.equilibration_steps < 0:
            raise ConfigError('equilibration steps cannot be negative')
        if not self.thermostat_time > 0:
            raise ConfigError('thermostat time must be positive (use inf to disable)')

    @property
    def frames(self):
        return self.production_steps // self.stride


@dataclass(frozen=True, eq=False)
class MdResult:
    """What one NVT run reports back."""

    rdf: Tabulated
    rdf_error: np.ndarray
    pressure: float
    pressure_error: float
    temperature: float
    frames: int
    energies: np.ndarray
    max_momentum: float


def check_rdf_range(grid, state):
    """
    The RDF histogram (and hence the cutoff) must fit in half the box; the
    last bin reaches (m + 1/2) dr.
    """
    half_box = 0.5 * state.box_length
    reach = (grid.m + 0.5) * grid.spacing
    if reach > half_box:
        raise RdfRangeExceedsBox(
            f'RDF histogram reaches r = {reach:g}, beyond half the box length {half_box:g}; '
            f'use at most m = {int(half_box / grid.spacing - 0.5)} grid points'
        )


def soften_core(u, kt):
    """
    Continue the potential linearly below the radius where it drops under
    SOFT_CORE_CAP * kT, so the cubic interpolant of a steep core does not
    ring. The repulsive slope at the cap is kept.
    """
    values = np.array(u.values)
    cap = SOFT_CORE_CAP * kt
    above = np.flatnonzero(~(values <= cap))
    if above.size == 0:
        return u
    edge = int(above[-1]) + 1
    if edge >= len(values) - 1:
        raise BlowUp('potential exceeds the soft-core cap on the whole table')
    r = u.radii
    slope = max((values[edge] - values[edge + 1]) / u.grid.spacing, 0.0)
    values[:edge] = values[edge] + slope * (r[edge] - r[:edge])
    return u.replace(values)


class MdSimulation:
    """
    One canonical-ensemble simulation; owns its particle state.

    Usage:
        result = MdSimulation(u, state, params).run()
    """

    def __init__(self, u, state, params):
        if not state.density > 0:
            raise ConfigError('molecular dynamics needs a positive density')
        check_rdf_range(u.grid, state)
        self.grid = u.grid
        self.state = state
        self.params = params
        self.box = state.box_length
        self.volume = self.box ** 3
        self.n = state.particles
        self.degrees = 3 * self.n - 3
        self.cutoff = u.grid.cutoff
        self.rng = np.random.default_rng(params.seed)

        fine = refine_tenfold(soften_core(u, state.kt))
        self._energy = CubicSpline(fine.radii, fine.values, bc_type='not-a-knot')
        self._slope = self._energy.derivative()
        self._potential_is_zero = not np.any(u.values)

        self.positions = self._lattice()
        self.velocities = self._maxwell_boltzmann()
        self.forces, self.potential_energy, self.virial = self._compute_forces()

    # ----- Initial configuration -----

    def _lattice(self):
        """Simple cubic lattice filling the box; melts during equilibration."""
        per_side = math.ceil(self.n ** (1.0 / 3.0) - 1e-9)
        spacing = self.box / per_side
        axis = (np.arange(per_side) + 0.5) * spacing
        sites = np.stack(np.meshgrid(axis, axis, axis, indexing='ij'), axis=-1)
        return sites.reshape(-1, 3)[:self.n].copy()

    def _maxwell_boltzmann(self):
        velocities = self.rng.normal(0.0, math.sqrt(self.state.kt), size=(self.n, 3))
        velocities -= velocities.mean(axis=0)
        kinetic = 0.5 * np.sum(velocities ** 2)
        target = 0.5 * self.degrees * self.state.kt
        return velocities * math.sqrt(target / kinetic)

    # ----- Interactions -----

    def _wrapped(self):
        wrapped = np.mod(self.positions, self.box)
        return np.where(wrapped >= self.box, 0.0, wrapped)

    def _pairs(self, positions, radius):
        """Index pairs within `radius` and their minimum-image separations."""
        tree = cKDTree(positions, boxsize=self.box)
        pairs = tree.query_pairs(radius, output_type='ndarray')
        delta = positions[pairs[:, 0]] - positions[pairs[:, 1]]
        delta -= self.box * np.round(delta / self.box)
        distance = np.sqrt(np.sum(delta * delta, axis=1))
        return pairs, delta, distance

    def _compute_forces(self):
        forces = np.zeros((self.n, 3))
        if self._potential_is_zero:
            return forces, 0.0, 0.0
        pairs, delta, distance = self._pairs(self._wrapped(), self.cutoff)
        inside = distance < self.cutoff
        pairs, delta, distance = pairs[inside], delta[inside], distance[inside]
        energy = float(np.sum(self._energy(distance)))
        magnitude = -self._slope(distance)              # -du/dr
        pair_force = (magnitude / distance)[:, None] * delta
        for axis in range(3):
            forces[:, axis] = (
                np.bincount(pairs[:, 0], weights=pair_force[:, axis], minlength=self.n)
                - np.bincount(pairs[:, 1], weights=pair_force[:, axis], minlength=self.n)
            )
        virial = float(np.sum(magnitude * distance))
        return forces, energy, virial

    # ----- Dynamics -----

    def kinetic_energy(self):
        return 0.5 * float(np.sum(self.velocities ** 2))

    def _thermostat(self):
        """Bussi stochastic velocity rescaling towards the target temperature."""
        tau = self.params.thermostat_time
        if not math.isfinite(tau):
            return
        kinetic = self.kinetic_energy()
        target = 0.5 * self.degrees * self.state.kt
        decay = math.exp(-self.params.timestep / tau)
        noise = self.rng.standard_normal()
        chi2 = self.rng.chisquare(self.degrees - 1) if self.degrees > 1 else 0.0
        new_kinetic = (
            kinetic
            + (1.0 - decay) * (target * (chi2 + noise * noise) / self.degrees - kinetic)
            + 2.0 * noise * math.sqrt(kinetic * target / self.degrees * (1.0 - decay) * decay)
        )
        self.velocities *= math.sqrt(max(new_kinetic, 0.0) / kinetic)

    def step(self):
        """One velocity Verlet step followed by the thermostat."""
        dt = self.params.timestep
        self.velocities += 0.5 * dt * self.forces
        self.positions += dt * self.velocities
        self.forces, self.potential_energy, self.virial = self._compute_forces()
        self.velocities += 0.5 * dt * self.forces
        self._thermostat()

        kinetic = self.kinetic_energy()
        limit = BLOWUP_FACTOR * 0.5 * self.degrees * self.state.kt
        if not math.isfinite(kinetic) or kinetic > limit:
            raise BlowUp(
                f'kinetic energy {kinetic:.3e} exceeds {limit:.3e}; '
                'check the potential table and the timestep'
            )

    # ----- Sampling -----

    def _bin_edges(self):
        return (np.arange(self.grid.m + 1) + 0.5) * self.grid.spacing

    def run(self):
        params = self.params
        logger.info('MD: N=%d rho0=%g T=%g L=%.4g, %d equilibration + %d production steps',
                    self.n, self.state.density, self.state.temperature, self.box,
                    params.equilibration_steps, params.production_steps)
        for _ in range(params.equilibration_steps):
            self.step()

        edges = self._bin_edges()
        counts = np.zeros(self.grid.m)
        pressures, temperatures, energies, momenta = [], [], [], []
        trajectory = None
        if params.trajectory:
            Path(params.trajectory).parent.mkdir(parents=True, exist_ok=True)
            trajectory = open(params.trajectory, 'w')
        try:
            for index in range(1, params.production_steps + 1):
                self.step()
                if index % params.stride:
                    continue
                positions = self._wrapped()
                _, _, distance = self._pairs(positions, edges[-1])
                counts += np.histogram(distance, bins=edges)[0]

                kinetic = self.kinetic_energy()
                temperature = 2.0 * kinetic / (self.degrees * self.state.boltzmann)
                pressures.append(
                    (self.n * self.state.boltzmann * temperature + self.virial / 3.0)
                    / self.volume
                )
                temperatures.append(temperature)
                energies.append(kinetic + self.potential_energy)
                momenta.append(float(np.max(np.abs(self.velocities.sum(axis=0)))))
                if trajectory:
                    np.savetxt(trajectory, positions, fmt='%.10g')
        finally:
            if trajectory:
                trajectory.close()

        frames = len(pressures)
        shell = 4.0 / 3.0 * np.pi * (edges[1:] ** 3 - edges[:-1] ** 3)
        probability = shell / self.volume
        expected = frames * 0.5 * self.n * (self.n - 1) * probability
        g = counts / expected
        g_error = np.sqrt(counts * np.clip(1.0 - probability, 0.0, 1.0)) / expected

        pressures = np.array(pressures)
        logger.info('MD: %d frames, <p> = %.5g, <T> = %.5g', frames,
                    pressures.mean(), np.mean(temperatures))
        return MdResult(
            rdf=Tabulated(self.grid, g, RDF),
            rdf_error=g_error,
            pressure=float(pressures.mean()),
            pressure_error=block_standard_error(pressures),
            temperature=float(np.mean(temperatures)),
            frames=frames,
            energies=np.array(energies),
            max_momentum=max(momenta),
        )


def block_standard_error(samples, blocks=PRESSURE_BLOCKS):
    """Standard error of the mean from block averages."""
    samples = np.asarray(samples)
    if len(samples) < 2 * blocks:
        return float(samples.std(ddof=1) / math.sqrt(len(samples))) if len(samples) > 1 else 0.0
    usable = len(samples) - len(samples) % blocks
    means = samples[:usable].reshape(blocks, -1).mean(axis=1)
    return float(means.std(ddof=1) / math.sqrt(blocks))


def run_nvt(u, state, params):
    """Simulate the canonical ensemble of u and measure g and p."""
    return MdSimulation(u, state, params).run()
