"""
Settings for lspsim.
Base settings shared across all environments.
"""

import os
from pathlib import Path

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent.parent


def get_env(name, default=None):
    return os.getenv(name, default)


def get_env_bool(name, default=False):
    value = os.getenv(name)
    if value is None:
        return default
    return value.strip().lower() in {"1", "true", "yes", "on"}


# Kernel
DEFAULT_SEED = int(get_env("LSPSIM_SEED", 1))
# "Infinite-capacity" link medium
MAX_MEDIUM_SERVERS = int(get_env("LSPSIM_MAX_MEDIUM_SERVERS", 65536))

# Network shell
DATA_PRIORITY = 0
CONTROL_PRIORITY = 1
HOP_LIMIT = int(get_env("LSPSIM_HOP_LIMIT", 64))

# MPLS control plane
FIRST_LABEL = 16

# Output
OUTPUT_DIR = Path(get_env("LSPSIM_OUTPUT_DIR", BASE_DIR / "results"))
TIME_DECIMALS = 9
PACKETS_CSV_NAME = "packets.csv"
SUMMARY_NAME = "summary.txt"
TRACE_NAME = "trace.txt"
SWEEP_CSV_NAME = "sweep.csv"
DELAY_PLOT_NAME = "delay.png"
JITTER_PLOT_NAME = "jitter.png"

# Celery (independent scenario runs). Eager unless a broker is configured.
CELERY_BROKER_URL = get_env("CELERY_BROKER_URL", "memory://")
CELERY_RESULT_BACKEND = get_env("CELERY_RESULT_BACKEND", "cache+memory://")
CELERY_TASK_ALWAYS_EAGER = get_env_bool("CELERY_TASK_ALWAYS_EAGER", True)
CELERY_TASK_EAGER_PROPAGATES = True

LOG_FORMAT = get_env("LSPSIM_LOG_FORMAT", "default")

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "default": {
            "format": "%(asctime)s %(levelname)s %(name)s: %(message)s",
        },
        "json": {
            "()": "pythonjsonlogger.json.JsonFormatter",
            "fmt": "%(asctime)s %(levelname)s %(name)s %(message)s",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": LOG_FORMAT,
        }
    },
    "root": {
        "handlers": ["console"],
        "level": "WARNING",
    },
    "loggers": {
        "lspsim": {
            "level": get_env("LSPSIM_LOG_LEVEL", "INFO"),
        },
    },
}
