"""
=============================================================================
invert - Reconstruct a Pair Potential from a Target RDF
=============================================================================

Usage:
    python manage.py invert CONFIG [--seed N] [--output-dir DIR] [--catalog]

Steps:
    1. load the target RDF ([paths] target) or synthesize it from the
       [model] potential ([target] source = hnc | md | ldl)
    2. start from the potential of mean force and iterate the [scheme]
       update with the [forward] operator
    3. write the run directory (history.csv, potential_KKK.dat, ...)
    4. with --catalog, store the run in the project database

A failed iteration still leaves the partial run on disk; the command then
exits with the code of the error that stopped it.

=============================================================================
"""

from pathlib import Path

from apps.core.commands import HendersonCommand
from apps.core.config import load_run_config
from apps.core.exceptions import ConfigError
from apps.core.grids import RDF
from apps.core.tables import load_tabulated
from apps.inversion.driver import run_inversion
from apps.inversion.forward import make_forward, synthesize_target
from apps.inversion.history import write_run_directory
from apps.inversion.models import InversionRun
from apps.structure.thermo import kirkwood_buff_compressibility


def load_target(cfg):
    if cfg.target_source == 'file':
        return load_tabulated(cfg.target_path, RDF, cfg.grid)
    return synthesize_target(cfg.target_source, cfg.model_potential(), cfg.state,
                             hnc=cfg.hnc, md=cfg.md)


class Command(HendersonCommand):
    help = 'Iterate an update rule until the simulated RDF matches the target.'

    def add_arguments(self, parser):
        parser.add_argument('config', help='INI run configuration')
        parser.add_argument('--seed', type=int, help='Override [md] seed')
        parser.add_argument('--output-dir', help='Run directory (default: [paths] output)')
        parser.add_argument('--catalog', action='store_true',
                            help='Record the run in the project database')

    def run(self, *args, **options):
        cfg = load_run_config(options['config'], seed=options['seed'])
        if cfg.scheme is None:
            raise ConfigError(f'{cfg.path}: invert needs a [scheme] section')

        target = load_target(cfg)
        reference = cfg.reference()
        forward = make_forward(cfg.forward, cfg.state, hnc=cfg.hnc, md=cfg.md)
        history = run_inversion(target, cfg.state, cfg.scheme, forward, u_ref=reference)

        output = Path(options['output_dir']) if options['output_dir'] else cfg.output_dir
        write_run_directory(output, history, target, config_text=cfg.text, reference=reference,
                            keep_best=cfg.scheme.keep_best)
        if options['catalog']:
            run = InversionRun.from_history(cfg.name, cfg.scheme, cfg.state, output, history)
            self.report('catalog entry', run.pk)

        chosen = history.selected(cfg.scheme.keep_best)
        self.report('records', len(history))
        if chosen is not None:
            label = 'best iterate' if cfg.scheme.keep_best else 'last iterate'
            self.report(label, f'k={chosen.k} (data fit {chosen.data_fit:.4e})')
            self.report('S(0) target', f'{kirkwood_buff_compressibility(target, cfg.state):.6g}')
            self.report('S(0) selected iterate',
                        f'{kirkwood_buff_compressibility(chosen.rdf, cfg.state):.6g}')
        if history.failure is not None:
            self.stdout.write(self.style.WARNING(f'Run stopped early; partial results in {output}'))
            self.fail(history.failure)
        self.success(f'{cfg.scheme.name} run written to {output}')
