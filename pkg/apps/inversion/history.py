"""
=============================================================================
Iteration History and Run Directories
=============================================================================

One IterationRecord per forward evaluation, indexed contiguously from 0.
A run directory stores a finished history:

    run.ini              copy of the configuration
    target.dat           target RDF
    reference.dat        reference potential (when known)
    history.csv          k, data_fit, epsilon, pressure, constraint_residual, status
    potential_KKK.dat    u_k for every record
    rdf_KKK.dat          g_k for every record with a forward result
    best.txt             index of the keep-best iterate (argmin data fit)

=============================================================================
"""

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from apps.core.exceptions import NoRuns
from apps.core.grids import POTENTIAL, RDF
from apps.core.tables import load_tabulated, save_tabulated

HISTORY_FILE = 'history.csv'
HISTORY_COLUMNS = ('k', 'data_fit', 'epsilon', 'pressure', 'constraint_residual', 'status')

STATUS_OK = 'ok'


@dataclass(frozen=True, eq=False)
class IterationRecord:
    """Diagnostics of iterate k; immutable once appended."""

    k: int
    potential: object
    rdf: object = None
    data_fit: float = math.nan
    epsilon: float = math.nan
    pressure: float = math.nan
    constraint_residual: float = math.nan
    status: str = STATUS_OK

    def __post_init__(self):
        if not (math.isnan(self.data_fit) or self.data_fit >= 0):
            raise ValueError('data fit cannot be negative')

    @property
    def ok(self):
        return self.status == STATUS_OK


class IterationHistory:
    """Records of one inversion plus the error that ended it, if any."""

    def __init__(self):
        self.records = []
        self.failure = None

    def append(self, record):
        if record.k != len(self.records):
            raise ValueError(f'record {record.k} appended after {len(self.records)} records')
        self.records.append(record)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, index):
        return self.records[index]

    @property
    def best(self):
        """Keep-best iterate: smallest data fit among successful records."""
        candidates = [r for r in self.records if r.ok and not math.isnan(r.data_fit)]
        if not candidates:
            return None
        return min(candidates, key=lambda record: record.data_fit)

    def selected(self, keep_best=True):
        """The iterate a run reports: the best one, or the last successful one."""
        if keep_best:
            return self.best
        finished = [r for r in self.records if r.ok]
        return finished[-1] if finished else None

    def relative_errors(self):
        """epsilon_k / epsilon_0 for every record (NaN when unknown)."""
        if not self.records:
            return np.array([])
        epsilons = np.array([record.epsilon for record in self.records])
        first = epsilons[0]
        if not first > 0:
            return np.full(len(epsilons), math.nan)
        return epsilons / first


# ----- Run directory -----

def _format(value):
    return repr(float(value))


def potential_path(directory, k):
    return Path(directory) / f'potential_{k:03d}.dat'


def rdf_path(directory, k):
    return Path(directory) / f'rdf_{k:03d}.dat'


def write_run_directory(directory, history, target, config_text=None, reference=None,
                        keep_best=True):
    """
    Write every table and the CSV summary of a history. best.txt and
    potential_final.dat name the selected iterate (see selected()).
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    if config_text is not None:
        (directory / 'run.ini').write_text(config_text)
    save_tabulated(directory / 'target.dat', target, header='target RDF')
    if reference is not None:
        save_tabulated(directory / 'reference.dat', reference, header='reference potential')

    with (directory / HISTORY_FILE).open('w', newline='') as handle:
        writer = csv.writer(handle)
        writer.writerow(HISTORY_COLUMNS)
        for record in history:
            writer.writerow([
                record.k, _format(record.data_fit), _format(record.epsilon),
                _format(record.pressure), _format(record.constraint_residual), record.status,
            ])
            save_tabulated(potential_path(directory, record.k), record.potential,
                           header=f'potential u_{record.k}')
            if record.rdf is not None:
                save_tabulated(rdf_path(directory, record.k), record.rdf,
                               header=f'RDF g_{record.k}')

    chosen = history.selected(keep_best)
    (directory / 'best.txt').write_text(f'{chosen.k if chosen else ""}\n')
    if chosen is not None:
        save_tabulated(directory / 'potential_final.dat', chosen.potential,
                       header=f'selected potential u_{chosen.k}')


def read_history_rows(directory):
    """Rows of history.csv as dicts with numeric fields converted."""
    path = Path(directory) / HISTORY_FILE
    if not path.is_file():
        raise NoRuns(f'no {HISTORY_FILE} in {directory}')
    with path.open(newline='') as handle:
        rows = list(csv.DictReader(handle))
    if not rows:
        raise NoRuns(f'{path} holds no iterations')
    for row in rows:
        row['k'] = int(row['k'])
        for column in HISTORY_COLUMNS[1:-1]:
            row[column] = float(row[column])
    return rows


def load_run_tables(directory, k, grid):
    """(u_k, g_k or None) of record k, read back on `grid`."""
    potential = load_tabulated(potential_path(directory, k), POTENTIAL, grid)
    path = rdf_path(directory, k)
    rdf = load_tabulated(path, RDF, grid) if path.is_file() else None
    return potential, rdf
