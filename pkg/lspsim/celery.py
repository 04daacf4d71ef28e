"""
Celery configuration for lspsim.
"""

import os

from celery import Celery
from celery.signals import setup_logging

from .conf import configure_logging

# Set the default settings module for the 'celery' program.
os.environ.setdefault("LSPSIM_SETTINGS_MODULE", "lspsim.settings.dev")

app = Celery("lspsim")

# Settings are read from the settings module; every CELERY_* name applies.
app.config_from_object(os.environ["LSPSIM_SETTINGS_MODULE"], namespace="CELERY")

app.autodiscover_tasks(["lspsim.scenario"])


@setup_logging.connect
def configure_worker_logging(**kwargs):
    """Workers log through settings.LOGGING instead of Celery's own setup."""
    configure_logging()


app.conf.update(
    task_serializer="json",
    accept_content=["json"],
    result_serializer="json",
    timezone="UTC",
    enable_utc=True,
    result_expires=3600,
    worker_prefetch_multiplier=1,
    # One run per child keeps runs isolated
    worker_max_tasks_per_child=1,
    task_acks_late=True,
    task_reject_on_worker_lost=True,
)
