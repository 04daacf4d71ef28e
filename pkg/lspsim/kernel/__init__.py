from .engine import Kernel
from .events import Event, EventChain, EventKind
from .facility import Facility, FacilityStats, FacilityStatsView, ServiceOutcome, Token
from .random import (
    Exponential,
    Pareto,
    RngStream,
    Uniform,
    rng_exponential,
    rng_pareto,
    rng_uniform,
)

__all__ = [
    "Event",
    "EventChain",
    "EventKind",
    "Exponential",
    "Facility",
    "FacilityStats",
    "FacilityStatsView",
    "Kernel",
    "Pareto",
    "RngStream",
    "ServiceOutcome",
    "Token",
    "Uniform",
    "rng_exponential",
    "rng_pareto",
    "rng_uniform",
]
