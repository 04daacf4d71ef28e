"""
Pytest configuration and fixtures for the lspsim tests.
"""

import os
from pathlib import Path

os.environ.setdefault("LSPSIM_SETTINGS_MODULE", "lspsim.settings.test")

import pytest  # noqa: E402

from lspsim.kernel import Kernel  # noqa: E402
from lspsim.mplsctl import ControlPlane, Timers  # noqa: E402
from lspsim.netshell import NetShell  # noqa: E402
from lspsim.scenario import load_scenario, parse_scenario  # noqa: E402
from lspsim.scenario.runner import Simulation  # noqa: E402

FIXTURES_DIR = Path(__file__).resolve().parent.parent / "fixtures"
CASE_STUDY_PATH = FIXTURES_DIR / "case_study.scn"

# 10 Mb/s links with 10 ms of propagation, as in the case study
BANDWIDTH = 10e6
PROP_DELAY = 0.010

LINE_SCENARIO = """
[sim]
end 2.0
seed 7

[nodes]
3

[links]
1 2 10000000 0.010
2 3 10000000 0.010

[routes]
1 3 2
2 3 3

[generators]
1 CBR 1 3 512 64000 - - 0.5
"""

DIAMOND_SCENARIO = """
# 1 - 2 - 4 primary, 2 - 3 - 4 detour around 2-4
[sim]
end 3.0
seed 3
control_channel dedicated

[nodes]
4

[links]
1 2 10000000 0.010
2 4 10000000 0.010
2 3 10000000 0.010
3 4 10000000 0.010

[routes]
1 4 2
2 4 4

[generators]
1 CBR 1 4 512 64000 - - 0.5

[lsps]
1 1 4 0 1 2 4

[backups]
2 1 2 4 2 3 4

[failures]
2 4 1.5
"""


@pytest.fixture
def kernel():
    """Fresh kernel with a fixed seed."""
    return Kernel(seed=42)


@pytest.fixture
def shell(kernel):
    """Network shell over a three-node line 1 - 2 - 3."""
    shell = NetShell(kernel, medium_servers=64)
    for _ in range(3):
        shell.create_node()
    shell.create_duplex_link(1, 2, BANDWIDTH, PROP_DELAY)
    shell.create_duplex_link(2, 3, BANDWIDTH, PROP_DELAY)
    return shell


@pytest.fixture
def control(kernel, shell):
    """Control plane attached to the line shell."""
    return ControlPlane(kernel, shell, Timers())


@pytest.fixture
def line_config():
    """Parsed three-node line scenario with one CBR flow."""
    return parse_scenario(LINE_SCENARIO)


@pytest.fixture
def diamond_config():
    """Parsed four-node scenario with a protected LSP and a failure."""
    return parse_scenario(DIAMOND_SCENARIO)


@pytest.fixture
def diamond_simulation(diamond_config):
    """Built, not yet started, simulation of the diamond scenario."""
    simulation = Simulation(diamond_config)
    simulation.build()
    return simulation


@pytest.fixture
def line_scenario_text():
    """Text of the three-node line scenario."""
    return LINE_SCENARIO


@pytest.fixture
def line_path(tmp_path):
    """The line scenario written to a file."""
    path = tmp_path / "line.scn"
    path.write_text(LINE_SCENARIO)
    return path


@pytest.fixture(scope="session")
def case_study_path():
    """Path of the bundled case study scenario."""
    return CASE_STUDY_PATH


@pytest.fixture(scope="session")
def case_study_text():
    """Text of the bundled case study scenario."""
    return CASE_STUDY_PATH.read_text(encoding="utf-8")


@pytest.fixture
def case_study_config():
    """Parsed case study scenario."""
    return load_scenario(CASE_STUDY_PATH)


@pytest.fixture
def output_dir(tmp_path):
    """Temporary directory for result files."""
    path = tmp_path / "results"
    path.mkdir()
    return path


# Custom markers
def pytest_configure(config):
    """Configure pytest markers."""
    config.addinivalue_line("markers", "integration: mark test as integration test")
    config.addinivalue_line("markers", "unit: mark test as unit test")
    config.addinivalue_line("markers", "slow: mark test as slow running")


# Skip markers based on settings
def pytest_runtest_setup(item):
    """Set up test runs with conditional skipping."""
    # Skip slow tests in fast mode
    if item.get_closest_marker("slow"):
        if os.environ.get("PYTEST_FAST_MODE"):
            pytest.skip("Slow tests disabled in fast mode")
