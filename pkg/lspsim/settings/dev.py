"""
Development settings for lspsim.
"""

from .base import *  # noqa: F401,F403
from .base import LOG_FORMAT, get_env

OUTPUT_DIR = Path(get_env("LSPSIM_OUTPUT_DIR", "results"))  # noqa: F405

# Logging for development
LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": LOGGING["formatters"],  # noqa: F405
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": LOG_FORMAT,
            "level": "DEBUG",
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
