"""
=============================================================================
Run Configuration Forms - Validating INI Sections
=============================================================================

A run configuration is an INI file. Every section is validated by its own
Django form, exactly like user input from a web page:

    1. configparser reads the section into a dict of strings
    2. the matching form is bound to that dict
    3. form.is_valid() converts and checks every field
    4. form.cleaned_data holds the typed values, form.errors the complaints

Sections and their forms:
    [meta]     MetaForm           version (required, must be 1)
    [state]    StateForm          density, temperature, particles, boltzmann
    [grid]     GridForm           spacing, rdf_points, potential_points
    [model]    PotentialModelForm kind, epsilon, sigma, cutoff
    [target]   TargetForm         source
    [scheme]   SchemeForm         name, max_iterations, tolerance, ...
    [forward]  ForwardForm        operator
    [hnc]      HncForm            mix, tolerance, max_iterations
    [md]       MdForm             timestep, steps, stride, thermostat, seed
    [paths]    PathsForm          target, reference, potential, output

Blank fields fall back to the HENDERSON defaults in settings.

=============================================================================
"""

import math

from django import forms
from django.conf import settings

SCHEME_CHOICES = (
    ('IBI', 'Iterative Boltzmann inversion'),
    ('REL', 'Relative-difference IBI'),
    ('IHNC', 'Inverse hypernetted-chain iteration'),
    ('HNCN', 'Hypernetted-chain Newton iteration'),
    ('LWR', 'Secant (LWR) update'),
    ('PYV', 'Percus-Yevick variant'),
    ('HNCGN', 'Hypernetted-chain Gauss-Newton iteration'),
)

FORWARD_CHOICES = (
    ('HNC', 'Hypernetted-chain integral equation'),
    ('MD', 'NVT molecular dynamics'),
    ('LDL', 'Low-density limit g = exp(-beta u)'),
)

MODEL_CHOICES = (
    ('none', 'No model potential'),
    ('lj', 'Lennard-Jones'),
    ('tslj', 'Truncated and shifted Lennard-Jones'),
    ('zero', 'Ideal gas (u = 0)'),
)

TARGET_CHOICES = (
    ('file', 'Read from [paths] target'),
    ('hnc', 'HNC solution of the model potential'),
    ('md', 'MD simulation of the model potential'),
    ('ldl', 'Low-density limit of the model potential'),
)


def _positive(value, label):
    if value is not None and not value > 0:
        raise forms.ValidationError(f'{label} must be positive.')
    return value


class MetaForm(forms.Form):
    """[meta]: the format version keeps old configs from being misread."""

    version = forms.IntegerField()

    def clean_version(self):
        version = self.cleaned_data['version']
        if version != settings.CONFIG_VERSION:
            raise forms.ValidationError(
                f'Unsupported config version {version}; this build reads '
                f'version {settings.CONFIG_VERSION}.'
            )
        return version


class StateForm(forms.Form):
    """[state]: the thermodynamic state point."""

    density = forms.FloatField(min_value=0.0)
    temperature = forms.FloatField()
    particles = forms.IntegerField(required=False, min_value=2)
    boltzmann = forms.FloatField(required=False)

    def clean_temperature(self):
        return _positive(self.cleaned_data['temperature'], 'Temperature')

    def clean_particles(self):
        return self.cleaned_data.get('particles') or 500

    def clean_boltzmann(self):
        value = self.cleaned_data.get('boltzmann')
        return 1.0 if value is None else _positive(value, 'Boltzmann constant')


class GridForm(forms.Form):
    """[grid]: spacing dr, RDF points m and potential points n <= m."""

    spacing = forms.FloatField()
    rdf_points = forms.IntegerField(min_value=2)
    potential_points = forms.IntegerField(min_value=2)

    def clean_spacing(self):
        return _positive(self.cleaned_data['spacing'], 'Grid spacing')

    def clean(self):
        cleaned_data = super().clean()
        m = cleaned_data.get('rdf_points')
        n = cleaned_data.get('potential_points')
        if m is not None and n is not None and n > m:
            raise forms.ValidationError(
                f'potential_points ({n}) cannot exceed rdf_points ({m}).'
            )
        return cleaned_data


class PotentialModelForm(forms.Form):
    """[model]: an analytic potential used for synthetic targets and u_ref."""

    kind = forms.ChoiceField(choices=MODEL_CHOICES, required=False)
    epsilon = forms.FloatField(required=False)
    sigma = forms.FloatField(required=False)
    cutoff = forms.FloatField(required=False)

    def clean_kind(self):
        return self.cleaned_data.get('kind') or 'none'

    def clean(self):
        cleaned_data = super().clean()
        for name, default in (('epsilon', 1.0), ('sigma', 1.0), ('cutoff', 2.5)):
            value = cleaned_data.get(name)
            if value is None:
                cleaned_data[name] = default
            elif not value > 0:
                self.add_error(name, f'{name} must be positive.')
        return cleaned_data


class TargetForm(forms.Form):
    """[target]: where the target RDF comes from."""

    source = forms.ChoiceField(choices=TARGET_CHOICES, required=False)

    def clean_source(self):
        return self.cleaned_data.get('source') or 'file'


class SchemeForm(forms.Form):
    """[scheme]: the update rule and its stopping controls."""

    name = forms.ChoiceField(choices=SCHEME_CHOICES)
    max_iterations = forms.IntegerField(required=False, min_value=0)
    tolerance = forms.FloatField(required=False, min_value=0.0)
    weight_exponent = forms.FloatField(required=False, min_value=0.0)
    pressure_target = forms.FloatField(required=False)
    keep_best = forms.BooleanField(required=False)

    def clean_max_iterations(self):
        value = self.cleaned_data.get('max_iterations')
        return settings.HENDERSON['MAX_ITERATIONS'] if value is None else value

    def clean_weight_exponent(self):
        value = self.cleaned_data.get('weight_exponent')
        return settings.HENDERSON['WEIGHT_EXPONENT'] if value is None else value

    def clean_keep_best(self):
        # BooleanField reads a missing key as False; keep-best defaults to on
        if self.data.get('keep_best') in (None, ''):
            return True
        return self.cleaned_data['keep_best']

    def clean(self):
        cleaned_data = super().clean()
        if cleaned_data.get('pressure_target') is not None and cleaned_data.get('name') != 'HNCGN':
            raise forms.ValidationError('A pressure target is only allowed with the HNCGN scheme.')
        return cleaned_data


class ForwardForm(forms.Form):
    """[forward]: which forward operator simulates g_k = G(u_k)."""

    operator = forms.ChoiceField(choices=FORWARD_CHOICES, required=False)

    def clean_operator(self):
        return self.cleaned_data.get('operator') or 'HNC'


class HncForm(forms.Form):
    """[hnc]: Picard iteration controls."""

    mix = forms.FloatField(required=False)
    tolerance = forms.FloatField(required=False)
    max_iterations = forms.IntegerField(required=False, min_value=1)

    def clean_mix(self):
        mix = self.cleaned_data.get('mix')
        if mix is None:
            return settings.HENDERSON['HNC_MIX']
        if not 0 < mix <= 1:
            raise forms.ValidationError('Mixing parameter must lie in (0, 1].')
        return mix

    def clean_tolerance(self):
        value = self.cleaned_data.get('tolerance')
        if value is None:
            return settings.HENDERSON['HNC_TOLERANCE']
        return _positive(value, 'HNC tolerance')

    def clean_max_iterations(self):
        value = self.cleaned_data.get('max_iterations')
        return settings.HENDERSON['HNC_MAX_ITERATIONS'] if value is None else value


class MdForm(forms.Form):
    """
    [md]: molecular dynamics controls.

    thermostat_time accepts 'inf' (or 'off') to run without a thermostat,
    which FloatField would reject.
    """

    timestep = forms.FloatField(required=False)
    equilibration_steps = forms.IntegerField(required=False, min_value=0)
    production_steps = forms.IntegerField(required=False, min_value=1)
    stride = forms.IntegerField(required=False, min_value=1)
    thermostat_time = forms.CharField(required=False)
    seed = forms.IntegerField(required=False, min_value=0)

    def clean_timestep(self):
        value = self.cleaned_data.get('timestep')
        if value is None:
            return settings.HENDERSON['MD_TIMESTEP']
        return _positive(value, 'Timestep')

    def clean_thermostat_time(self):
        text = (self.cleaned_data.get('thermostat_time') or '').strip().lower()
        if not text:
            return None
        if text in ('inf', 'off', 'none'):
            return math.inf
        try:
            value = float(text)
        except ValueError:
            raise forms.ValidationError('Thermostat time must be a number or "inf".') from None
        return _positive(value, 'Thermostat time')

    def clean(self):
        cleaned_data = super().clean()
        defaults = settings.HENDERSON
        if cleaned_data.get('equilibration_steps') is None:
            cleaned_data['equilibration_steps'] = defaults['MD_EQUILIBRATION_STEPS']
        if cleaned_data.get('stride') is None:
            cleaned_data['stride'] = defaults['MD_STRIDE']
        if cleaned_data.get('production_steps') is None and cleaned_data.get('stride'):
            cleaned_data['production_steps'] = defaults['MD_FRAMES'] * cleaned_data['stride']
        if cleaned_data.get('seed') is None:
            cleaned_data['seed'] = defaults['MD_SEED']
        if cleaned_data.get('thermostat_time') is None and cleaned_data.get('timestep'):
            cleaned_data['thermostat_time'] = (
                defaults['MD_THERMOSTAT_STEPS'] * cleaned_data['timestep']
            )
        return cleaned_data


class PathsForm(forms.Form):
    """[paths]: files in and out; relative paths resolve against the config."""

    target = forms.CharField(required=False)
    reference = forms.CharField(required=False)
    potential = forms.CharField(required=False)
    output = forms.CharField(required=False)


SECTION_FORMS = {
    'meta': MetaForm,
    'state': StateForm,
    'grid': GridForm,
    'model': PotentialModelForm,
    'target': TargetForm,
    'scheme': SchemeForm,
    'forward': ForwardForm,
    'hnc': HncForm,
    'md': MdForm,
    'paths': PathsForm,
}

REQUIRED_SECTIONS = ('meta', 'state', 'grid')
