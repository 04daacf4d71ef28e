"""
lspsim: a discrete-event simulator for MPLS networks with RSVP-TE fast reroute.
"""

# Shared tasks bind to this app whenever lspsim is imported.
from .celery import app as celery_app

__version__ = "1.0.0"

__all__ = ("celery_app", "__version__")
