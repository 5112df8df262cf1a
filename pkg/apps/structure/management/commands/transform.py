"""
=============================================================================
transform - Radial Fourier Transform of a Table File
=============================================================================

Usage:
    python manage.py transform IN OUT --direction forward
    python manage.py transform IN OUT --direction inverse

Forward reads an (r, f) table on r_j = j dr and writes (w, f_hat) on the
frequency ladder, with the w = 0 limit as the first row. Inverse reads such
a spectral table and writes the (r, f) table back.

=============================================================================
"""

from apps.core.commands import HendersonCommand
from apps.core.grids import GENERIC
from apps.core.tables import load_tabulated, save_tabulated
from apps.structure.transforms import (
    load_spectral, radial_fft_forward, radial_fft_inverse, save_spectral,
)


class Command(HendersonCommand):
    help = 'Radial (3D isotropic) Fourier transform of a two-column table.'

    def add_arguments(self, parser):
        parser.add_argument('input', help='Input table file')
        parser.add_argument('output', help='Output table file')
        parser.add_argument(
            '--direction', choices=('forward', 'inverse'), default='forward',
            help='forward: r -> w, inverse: w -> r (default: forward)',
        )

    def run(self, *args, **options):
        if options['direction'] == 'forward':
            table = load_tabulated(options['input'], GENERIC)
            field = radial_fft_forward(table)
            save_spectral(options['output'], field,
                          header=f'radial transform of {options["input"]}')
            rows = table.grid.m
        else:
            field = load_spectral(options['input'])
            table = radial_fft_inverse(field)
            save_tabulated(options['output'], table,
                           header=f'inverse radial transform of {options["input"]}')
            rows = field.grid.m
        self.success(f'Wrote {options["direction"]} transform ({rows} points) to {options["output"]}')
