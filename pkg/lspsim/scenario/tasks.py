"""
Celery tasks for independent scenario runs.
"""

import logging

from celery import shared_task

from .parser import parse_scenario
from .runner import run_simulation

logger = logging.getLogger(__name__)


@shared_task(name="lspsim.scenario.run_scenario")
def run_scenario_task(scenario_text, seed, end=None):
    """
    Run one scenario with the given seed and return its sweep row.

    Each call builds its own kernel, so tasks share no state.
    """
    config = parse_scenario(scenario_text).with_overrides(seed=seed, sim_end=end)

    logger.info("Running scenario", extra={"seed": seed, "sim_end": config.sim_end})
    result = run_simulation(config)
    return result.report.as_row()
