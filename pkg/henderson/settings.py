"""
=============================================================================
Django Settings for the Henderson Project
=============================================================================

Central configuration for the inverse Henderson toolkit. There is no web
surface: Django is used for its app layout, management commands, forms
validation, signals, the ORM run catalog and the test runner.

Settings are organized into sections:
    1. Core Settings (DEBUG, SECRET_KEY)
    2. Application Definition (INSTALLED_APPS)
    3. Database Configuration (run catalog)
    4. Logging
    5. Numerical Defaults (HENDERSON)

Every numerical default can be overridden from the environment (or a .env
file) with HENDERSON_<KEY>, e.g. HENDERSON_HNC_MIX=0.2.

=============================================================================
"""

import os
from pathlib import Path
from dotenv import load_dotenv

load_dotenv()

# =============================================================================
# PATH CONFIGURATION
# =============================================================================

# BASE_DIR is the repository root (henderson/ -> project root)
BASE_DIR = Path(__file__).resolve().parent.parent

# =============================================================================
# SECURITY SETTINGS
# =============================================================================

# Nothing is signed or served, but Django refuses to start without a key
SECRET_KEY = os.environ.get('DJANGO_SECRET_KEY', 'henderson-local-only-key')

DEBUG = os.environ.get('DJANGO_DEBUG', '') == '1'

ALLOWED_HOSTS = []

# =============================================================================
# APPLICATION DEFINITION
# =============================================================================

INSTALLED_APPS = [
    # ----- Django Built-in Apps -----
    'django.contrib.contenttypes',   # Required by the ORM for model metadata

    # ----- Our Custom Apps -----
    'apps.core',                      # Grids, tables, config, errors
    'apps.structure',                 # Radial transforms, OZ/HNC, LJ models
    'apps.simulation',                # NVT molecular dynamics
    'apps.inversion',                 # Update rules, driver, run catalog
]

MIDDLEWARE = []

# =============================================================================
# DATABASE CONFIGURATION
# =============================================================================

# The database only holds the run catalog (manage.py invert --catalog).
# Run `python manage.py migrate` once before cataloguing runs.

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# =============================================================================
# INTERNATIONALIZATION
# =============================================================================

LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

# =============================================================================
# LOGGING
# =============================================================================

LOG_LEVEL = os.environ.get('HENDERSON_LOG_LEVEL', 'INFO').upper()

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'apps': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
    },
}

# =============================================================================
# NUMERICAL DEFAULTS
# =============================================================================

# Defaults used by the config forms when a run configuration omits a key.
# Library functions carry the same values as keyword defaults.


def _env_float(key, default):
    """Read HENDERSON_<key> from the environment as a float."""
    return float(os.environ.get(f'HENDERSON_{key}', default))


def _env_int(key, default):
    """Read HENDERSON_<key> from the environment as an int."""
    return int(os.environ.get(f'HENDERSON_{key}', default))


HENDERSON = {
    # ----- Grid / core handling -----
    'CORE_THRESHOLD': _env_float('CORE_THRESHOLD', 1e-6),   # RDF core cut
    'S_MIN': _env_float('S_MIN', 1e-8),                     # structure factor floor

    # ----- HNC forward solver -----
    'HNC_MIX': _env_float('HNC_MIX', 0.15),
    'HNC_TOLERANCE': _env_float('HNC_TOLERANCE', 1e-10),
    'HNC_MAX_ITERATIONS': _env_int('HNC_MAX_ITERATIONS', 10000),

    # ----- Molecular dynamics -----
    'MD_TIMESTEP': _env_float('MD_TIMESTEP', 0.002),
    'MD_EQUILIBRATION_STEPS': _env_int('MD_EQUILIBRATION_STEPS', 50000),
    'MD_STRIDE': _env_int('MD_STRIDE', 10),
    'MD_FRAMES': _env_int('MD_FRAMES', 3500),               # sampled frames
    'MD_THERMOSTAT_STEPS': _env_float('MD_THERMOSTAT_STEPS', 100.0),  # tau_T / dt
    'MD_SEED': _env_int('MD_SEED', 2019),

    # ----- Inversion -----
    'MAX_ITERATIONS': _env_int('MAX_ITERATIONS', 30),
    'TOLERANCE_HNC': _env_float('TOLERANCE_HNC', 1e-6),
    'TOLERANCE_MD': _env_float('TOLERANCE_MD', 0.05),
    'WEIGHT_EXPONENT': _env_float('WEIGHT_EXPONENT', 0.0),
}

# Version of the run configuration format accepted by apps.core.config
CONFIG_VERSION = 1
