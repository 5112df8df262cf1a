"""
=============================================================================
md - Canonical-Ensemble Simulation of a Tabulated Potential
=============================================================================

Usage:
    python manage.py md CONFIG [--seed N] [--output-dir DIR] [--trajectory PATH]

Writes into the output directory:
    rdf.dat          g(r_j), j = 1..m
    rdf_error.dat    per-bin standard error of g
    energy.dat       total energy per sampled frame (frame time, E)
    summary.txt      pressure, temperature, frames, max |total momentum|

Same config and seed give byte-identical files. Exit code 5 when the RDF
range does not fit into half the box.

=============================================================================
"""

from dataclasses import replace
from pathlib import Path

import numpy as np

from apps.core.commands import HendersonCommand
from apps.core.config import load_run_config
from apps.core.tables import save_tabulated, write_table
from apps.simulation.md import run_nvt


class Command(HendersonCommand):
    help = 'Run NVT molecular dynamics and measure g(r) and the pressure.'

    def add_arguments(self, parser):
        parser.add_argument('config', help='INI run configuration')
        parser.add_argument('--seed', type=int, help='Override [md] seed')
        parser.add_argument('--output-dir', help='Directory for result files')
        parser.add_argument('--trajectory', help='Write sampled frames to this file')

    def run(self, *args, **options):
        cfg = load_run_config(options['config'], seed=options['seed'])
        params = cfg.md
        if options['trajectory']:
            params = replace(params, trajectory=Path(options['trajectory']))
        potential = cfg.input_potential()
        result = run_nvt(potential, cfg.state, params)

        output = Path(options['output_dir']) if options['output_dir'] else cfg.output_dir
        output.mkdir(parents=True, exist_ok=True)
        header = f'NVT MD, N={cfg.state.particles} rho0={cfg.state.density:g} seed={params.seed}'
        save_tabulated(output / 'rdf.dat', result.rdf, header=header)
        write_table(output / 'rdf_error.dat', result.rdf.radii, result.rdf_error,
                    header='standard error of g')
        times = (np.arange(1, result.frames + 1) * params.stride) * params.timestep
        write_table(output / 'energy.dat', times, result.energies, header='total energy')
        summary = (
            f'pressure {result.pressure!r}\n'
            f'pressure_error {result.pressure_error!r}\n'
            f'temperature {result.temperature!r}\n'
            f'frames {result.frames}\n'
            f'max_momentum {result.max_momentum!r}\n'
            f'ideal_gas_pressure {cfg.state.density * cfg.state.kt!r}\n'
        )
        (output / 'summary.txt').write_text(summary)

        self.success(f'MD finished; results in {output}')
        self.report('frames', result.frames)
        self.report('pressure', f'{result.pressure:.6g} +- {result.pressure_error:.2g}')
        self.report('temperature', f'{result.temperature:.6g}')
