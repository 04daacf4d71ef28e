"""
Unit tests for the Celery scenario task.
"""

import pytest

from lspsim import celery_app
from lspsim.errors import ConfigError
from lspsim.scenario.tasks import run_scenario_task


@pytest.mark.unit
class TestRunScenarioTask:
    """Test cases for independent scenario runs."""

    def test_app_runs_eagerly_under_test_settings(self):
        """Test tasks run in-process with the test settings."""
        assert celery_app.conf.task_always_eager

    def test_task_returns_sweep_row(self, line_scenario_text):
        """Test the task overrides seed and end and returns the report row."""
        row = run_scenario_task.apply(args=(line_scenario_text, 5, 1.0)).get()
        assert row["seed"] == 5
        assert row["sent"] > 0
        assert row["received"] <= row["sent"]
        assert row["dropped_at_failure"] == 0

    def test_same_seed_same_row(self, line_scenario_text):
        """Test runs share no state between calls."""
        first = run_scenario_task.apply(args=(line_scenario_text, 3, 1.0)).get()
        second = run_scenario_task.apply(args=(line_scenario_text, 3, 1.0)).get()
        first.pop("runtime")
        second.pop("runtime")
        assert first == second

    def test_invalid_scenario_propagates(self):
        """Test a bad scenario raises from an eager task."""
        with pytest.raises(ConfigError):
            run_scenario_task.apply(args=("[nodes]\n2\n", 1)).get()
