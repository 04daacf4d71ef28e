"""
Test settings for lspsim.
"""

from .base import *  # noqa: F401,F403

DEFAULT_SEED = 1

# Runs stay in-process during tests
CELERY_BROKER_URL = "memory://"
CELERY_RESULT_BACKEND = "cache+memory://"
CELERY_TASK_ALWAYS_EAGER = True
CELERY_TASK_EAGER_PROPAGATES = True

OUTPUT_DIR = Path("/tmp/lspsim_test_results")  # noqa: F405

# Disable logging during tests
LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "handlers": {
        "null": {
            "class": "logging.NullHandler",
        },
    },
    "root": {
        "handlers": ["null"],
    },
}
