"""
=============================================================================
Run Configuration - Loading and Assembling an INI File
=============================================================================

load_run_config(path) reads an INI file with configparser, validates every
section with its form (apps/core/forms.py) and assembles the typed objects
the commands need:

    RunConfig.state      StatePoint
    RunConfig.grid       RadialGrid
    RunConfig.model      ModelSpec (analytic potential, may be 'none')
    RunConfig.scheme     SchemeConfig, or None without a [scheme] section
    RunConfig.hnc        HNC solver keyword arguments
    RunConfig.md         MdParams

Every problem (syntax, unknown section or key, invalid value, missing
referenced file) becomes a ConfigError naming the section and field.

=============================================================================
"""

import configparser
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from django.conf import settings

from apps.simulation.md import MdParams, check_rdf_range
from apps.inversion.schemes import SchemeConfig
from apps.structure.thermo import LjParams, reference_potential

from .exceptions import ConfigError
from .forms import REQUIRED_SECTIONS, SECTION_FORMS
from .grids import POTENTIAL, Tabulated, make_grid
from .state import StatePoint
from .tables import load_tabulated

# Keys whose values are tags; matched case-insensitively
UPPERCASE_KEYS = {('scheme', 'name'), ('forward', 'operator')}
LOWERCASE_KEYS = {('model', 'kind'), ('target', 'source')}


@dataclass(frozen=True)
class ModelSpec:
    """Analytic model potential named in [model]."""

    kind: str = 'none'
    params: LjParams = LjParams()

    def tabulate(self, grid):
        if self.kind == 'none':
            return None
        if self.kind == 'zero':
            return Tabulated(grid, np.zeros(grid.n), POTENTIAL)
        return reference_potential(grid, self.params, truncated=self.kind == 'tslj')


@dataclass(frozen=True)
class RunConfig:
    """A validated run configuration."""

    path: Path
    text: str
    state: StatePoint
    grid: object
    model: ModelSpec
    target_source: str
    forward: str
    scheme: SchemeConfig
    hnc: dict
    md: MdParams
    target_path: Path = None
    reference_path: Path = None
    potential_path: Path = None
    output_dir: Path = None

    @property
    def name(self):
        return self.path.stem

    @property
    def seed(self):
        return self.md.seed

    def with_seed(self, seed):
        """A copy whose MD seed is replaced (the --seed flag)."""
        if seed is None:
            return self
        return replace(self, md=replace(self.md, seed=seed))

    def model_potential(self):
        return self.model.tabulate(self.grid)

    def input_potential(self):
        """[paths] potential if given, else the model potential."""
        if self.potential_path is not None:
            return load_tabulated(self.potential_path, POTENTIAL, self.grid)
        potential = self.model_potential()
        if potential is None:
            raise ConfigError(f'{self.path}: give [paths] potential or a [model] kind')
        return potential

    def reference(self):
        """u_ref: the reference file, else the model behind a synthetic target."""
        if self.reference_path is not None:
            return load_tabulated(self.reference_path, POTENTIAL, self.grid)
        if self.target_source != 'file':
            return self.model_potential()
        return None


def _validate(parser, section):
    raw = dict(parser[section]) if parser.has_section(section) else {}
    for key in list(raw):
        if (section, key) in UPPERCASE_KEYS:
            raw[key] = raw[key].strip().upper()
        elif (section, key) in LOWERCASE_KEYS:
            raw[key] = raw[key].strip().lower()
    form_class = SECTION_FORMS[section]
    unknown = sorted(set(raw) - set(form_class.base_fields))
    if unknown:
        raise ConfigError(f'[{section}] unknown key(s): {", ".join(unknown)}')
    form = form_class(data=raw)
    if not form.is_valid():
        problems = '; '.join(
            f'{field}: {" ".join(messages)}' if field != '__all__' else ' '.join(messages)
            for field, messages in form.errors.items()
        )
        raise ConfigError(f'[{section}] {problems}')
    return form.cleaned_data


def _resolve(base, value, must_exist=True, label=''):
    if not value:
        return None
    path = Path(value)
    if not path.is_absolute():
        path = base / path
    if must_exist and not path.is_file():
        raise ConfigError(f'[paths] {label} file not found: {path}')
    return path


def parse_run_config(text, path):
    """Validate config text; `path` anchors relative file names."""
    path = Path(path)
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f'{path}: {exc}') from None

    unknown = sorted(set(parser.sections()) - set(SECTION_FORMS))
    if unknown:
        raise ConfigError(f'{path}: unknown section(s): {", ".join(unknown)}')
    for section in REQUIRED_SECTIONS:
        if not parser.has_section(section):
            raise ConfigError(f'{path}: missing required section [{section}]')

    data = {section: _validate(parser, section) for section in SECTION_FORMS
            if section != 'scheme' or parser.has_section('scheme')}

    defaults = settings.HENDERSON
    state_data = data['state']
    state = StatePoint(state_data['density'], state_data['temperature'],
                       state_data['particles'], state_data['boltzmann'])
    grid_data = data['grid']
    grid = make_grid(grid_data['spacing'], grid_data['rdf_points'], grid_data['potential_points'])

    model_data = data['model']
    model = ModelSpec(model_data['kind'], LjParams(
        model_data['epsilon'], model_data['sigma'], model_data['cutoff']))

    forward = data['forward']['operator']
    scheme = None
    if 'scheme' in data:
        scheme_data = data['scheme']
        scheme = SchemeConfig(
            name=scheme_data['name'],
            max_iterations=scheme_data['max_iterations'],
            tolerance=scheme_data['tolerance'],
            weight_exponent=scheme_data['weight_exponent'],
            pressure_target=scheme_data['pressure_target'],
            forward=forward,
            keep_best=scheme_data['keep_best'],
            core_threshold=defaults['CORE_THRESHOLD'],
            s_min=defaults['S_MIN'],
        )
        if scheme.tolerance is None:
            key = 'TOLERANCE_MD' if forward == 'MD' else 'TOLERANCE_HNC'
            scheme = replace(scheme, tolerance=defaults[key])

    hnc_data = data['hnc']
    hnc = {'mix': hnc_data['mix'], 'tolerance': hnc_data['tolerance'],
           'max_iterations': hnc_data['max_iterations'], 's_min': defaults['S_MIN']}

    md_data = data['md']
    md = MdParams(
        timestep=md_data['timestep'],
        equilibration_steps=md_data['equilibration_steps'],
        production_steps=md_data['production_steps'],
        stride=md_data['stride'],
        thermostat_time=md_data['thermostat_time'],
        seed=md_data['seed'],
    )

    source = data['target']['source']
    base = path.parent
    paths = data['paths']
    target_path = _resolve(base, paths['target'], label='target')
    if source == 'file' and target_path is None and scheme is not None:
        raise ConfigError('[paths] target is required when [target] source = file')
    if source != 'file' and model.kind == 'none':
        raise ConfigError(f'[target] source = {source} needs a [model] kind')

    if forward == 'MD' or source == 'md':
        check_rdf_range(grid, state)

    return RunConfig(
        path=path, text=text, state=state, grid=grid, model=model,
        target_source=source, forward=forward, scheme=scheme, hnc=hnc, md=md,
        target_path=target_path,
        reference_path=_resolve(base, paths['reference'], label='reference'),
        potential_path=_resolve(base, paths['potential'], label='potential'),
        output_dir=_resolve(base, paths['output'], must_exist=False) or base / path.stem,
    )


def load_run_config(path, seed=None):
    """Read and validate an INI run configuration."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f'cannot read config {path}: {exc.strerror}') from None
    return parse_run_config(text, path).with_seed(seed)
