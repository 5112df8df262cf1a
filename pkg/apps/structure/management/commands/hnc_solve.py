"""
=============================================================================
hnc_solve - Solve the HNC Integral Equation for a Potential
=============================================================================

Usage:
    python manage.py hnc_solve CONFIG [--output PATH]

The potential is [paths] potential if given, else the [model] potential.
Writes the RDF table and reports the Picard iterations used, the final
residual, the virial pressure and the compressibility S(0).

Exit code 3 when the iteration does not converge, 4 when the structure
factor loses positivity.

=============================================================================
"""

from pathlib import Path

from apps.core.commands import HendersonCommand
from apps.core.config import load_run_config
from apps.core.tables import save_tabulated
from apps.structure.oz import HncSolver
from apps.structure.thermo import kirkwood_buff_compressibility, virial_pressure_quadrature


class Command(HendersonCommand):
    help = 'Solve the hypernetted-chain equation for the configured potential.'

    def add_arguments(self, parser):
        parser.add_argument('config', help='INI run configuration')
        parser.add_argument('--output', help='RDF table to write (default: <output>/rdf_hnc.dat)')

    def run(self, *args, **options):
        cfg = load_run_config(options['config'])
        potential = cfg.input_potential()
        solver = HncSolver(cfg.state, **cfg.hnc)
        solution = solver.solve(potential)

        output = Path(options['output']) if options['output'] else cfg.output_dir / 'rdf_hnc.dat'
        save_tabulated(output, solution.rdf, header=(
            f'HNC RDF, rho0={cfg.state.density:g} T={cfg.state.temperature:g}\n'
            f'iterations={solution.iterations} residual={solution.residual:.3e}'
        ))

        self.success(f'HNC converged; RDF written to {output}')
        self.report('Picard iterations', solution.iterations)
        self.report('density stages', solution.stages)
        self.report('residual', f'{solution.residual:.3e}')
        self.report('virial pressure', f'{virial_pressure_quadrature(potential, solution.rdf, cfg.state):.10g}')
        self.report('S(0) (Kirkwood-Buff)', f'{kirkwood_buff_compressibility(solution.rdf, cfg.state):.10g}')
