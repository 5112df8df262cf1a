"""
=============================================================================
analyze - Summarize a Run Directory
=============================================================================

Usage:
    python manage.py analyze RUN_DIR [--reference PATH] [--output PATH]

Emits one row per iterate:

    k, data_fit, epsilon_ratio (epsilon_k / epsilon_0), pressure, sup_norm

where sup_norm is the weighted sup norm (alpha = 4) of g_k - g. epsilon is
recomputed against --reference (or the run's reference.dat); without one
the history's own epsilon column is used. The keep-best iterate (smallest
data fit) is reported at the end.

Exit code 6 when the directory holds no history.

=============================================================================
"""

import csv
import math
from pathlib import Path

from apps.core.commands import HendersonCommand
from apps.core.exceptions import NoRuns
from apps.core.grids import GENERIC, POTENTIAL, RDF, RadialGrid
from apps.core.tables import ladder_spacing, load_tabulated, read_table
from apps.inversion.diagnostics import error_metric, weighted_sup_norm
from apps.inversion.history import load_run_tables, potential_path, read_history_rows

SUMMARY_COLUMNS = ('k', 'data_fit', 'epsilon_ratio', 'pressure', 'sup_norm')
SUP_NORM_EXPONENT = 4.0


def summarize(directory, reference_path=None):
    """Summary rows and the keep-best index of a run directory."""
    directory = Path(directory)
    rows = read_history_rows(directory)
    target_file = directory / 'target.dat'
    if not target_file.is_file():
        raise NoRuns(f'{directory} has a history but no target.dat')
    radii, _ = read_table(target_file)
    potential_rows = len(read_table(potential_path(directory, rows[0]['k']))[0])
    grid = RadialGrid(ladder_spacing(target_file, radii), len(radii), potential_rows)
    target = load_tabulated(target_file, RDF, grid)

    if reference_path is None and (directory / 'reference.dat').is_file():
        reference_path = directory / 'reference.dat'
    reference = load_tabulated(reference_path, POTENTIAL, grid) if reference_path else None

    summary = []
    for row in rows:
        potential, rdf = load_run_tables(directory, row['k'], grid)
        epsilon = row['epsilon']
        if reference is not None:
            epsilon = error_metric(potential, reference, target)
        sup_norm = math.nan
        if rdf is not None:
            sup_norm = weighted_sup_norm(rdf.replace(rdf.values - target.values, GENERIC),
                                         SUP_NORM_EXPONENT)
        summary.append({'k': row['k'], 'data_fit': row['data_fit'], 'epsilon': epsilon,
                        'pressure': row['pressure'], 'sup_norm': sup_norm,
                        'status': row['status']})

    first_epsilon = summary[0]['epsilon']
    for entry in summary:
        entry['epsilon_ratio'] = (entry['epsilon'] / first_epsilon
                                  if first_epsilon > 0 else math.nan)

    candidates = [e for e in summary if e['status'] == 'ok' and not math.isnan(e['data_fit'])]
    best = min(candidates, key=lambda e: e['data_fit'])['k'] if candidates else None
    return summary, best


class Command(HendersonCommand):
    help = 'Tabulate data fit, relative error and pressure of a finished run.'

    def add_arguments(self, parser):
        parser.add_argument('run_dir', help='Run directory written by invert')
        parser.add_argument('--reference', help='Reference potential table for epsilon')
        parser.add_argument('--output', help='Summary CSV (default: RUN_DIR/summary.csv)')

    def run(self, *args, **options):
        directory = Path(options['run_dir'])
        summary, best = summarize(directory, options['reference'])

        output = Path(options['output']) if options['output'] else directory / 'summary.csv'
        with output.open('w', newline='') as handle:
            writer = csv.writer(handle)
            writer.writerow(SUMMARY_COLUMNS)
            for entry in summary:
                writer.writerow([entry['k']] + [repr(float(entry[c])) for c in SUMMARY_COLUMNS[1:]])

        self.stdout.write(f'{"k":>4} {"data_fit":>12} {"eps/eps0":>12} {"pressure":>14} {"sup_norm":>12}')
        for entry in summary:
            self.stdout.write(
                f'{entry["k"]:>4} {entry["data_fit"]:>12.4e} {entry["epsilon_ratio"]:>12.4e} '
                f'{entry["pressure"]:>14.6g} {entry["sup_norm"]:>12.4e}'
            )
        if best is not None:
            self.success(f'Best iterate: k={best}')
        self.success(f'Summary written to {output}')
