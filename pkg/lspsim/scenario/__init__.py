from .config import ScenarioConfig
from .parser import dump_scenario, load_scenario, parse_scenario
from .report import (
    CSV_COLUMNS,
    FailureReport,
    FlowReport,
    RunReport,
    TraceRecorder,
    emit_packets_csv,
    emit_summary,
    emit_trace,
)
from .runner import Simulation, SimulationResult, run_simulation

__all__ = [
    "CSV_COLUMNS",
    "FailureReport",
    "FlowReport",
    "RunReport",
    "ScenarioConfig",
    "Simulation",
    "SimulationResult",
    "TraceRecorder",
    "dump_scenario",
    "emit_packets_csv",
    "emit_summary",
    "emit_trace",
    "load_scenario",
    "parse_scenario",
    "run_simulation",
]
