"""
Django settings for the polar-list-sim project.

Django is used for its settings layer and management-command framework
only: there are no models, URLs or database connections.
"""

from pathlib import Path
import os
from polar.management.logging_config import logging_config
from dotenv import load_dotenv


def _env_bool(name: str, default: bool = False) -> bool:
    v = os.getenv(name)
    if v is None:
        return default
    return str(v).strip().lower() in ("1", "true", "yes", "on")


def _env_int(name: str, default: int) -> int:
    v = os.getenv(name)
    if v is None or not str(v).strip():
        return default
    return int(str(v).strip())


# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Load environment variables from .env file
load_dotenv()

# Set up logging configuration
logging_config()

# Only used by Django internals; nothing here is signed or served.
SECRET_KEY = os.getenv("SECRET_KEY", "polar-list-sim-local-only")

DEBUG = _env_bool("DEBUG", default=False)

INSTALLED_APPS = [
    "polar",
]

DATABASES = {}

TIME_ZONE = "UTC"
USE_TZ = True

# Campaign defaults; every one of them can be overridden in the run config.
POLAR_WORKERS = max(1, _env_int("POLAR_WORKERS", 1))
POLAR_RESULTS_DIR = Path(os.getenv("POLAR_RESULTS_DIR", "results"))
POLAR_MIN_ERRORS = max(0, _env_int("POLAR_MIN_ERRORS", 100))
