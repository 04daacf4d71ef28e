"""
Unit tests for scenario parsing and validation.
"""

import pytest
from pydantic import ValidationError

from lspsim.errors import ConfigError
from lspsim.netshell import GeneratorKind
from lspsim.scenario import dump_scenario, load_scenario, parse_scenario

MINIMAL = """
[sim]
end 1.5

[nodes]
2

[links]
1 2 1000000 0.001
"""


def errors_of(text):
    with pytest.raises(ConfigError) as excinfo:
        parse_scenario(text)
    return excinfo.value.errors


@pytest.mark.unit
class TestParseCaseStudy:
    """Test cases for reading the bundled case study."""

    def test_topology(self, case_study_config):
        """Test nodes, links and routes are read."""
        config = case_study_config
        assert config.nodes == 10
        assert len(config.links) == 13
        assert len(config.routes) == 5
        assert config.control_channel == "dedicated"
        assert config.sim_end == 50.0
        assert config.seed == 1

    def test_generator(self, case_study_config):
        """Test the ON/OFF voice source is read with its parameters."""
        (generator,) = case_study_config.generators
        assert generator.kind is GeneratorKind.EXP_ON_OFF
        assert (generator.node, generator.dst, generator.size, generator.rate) == (1, 6, 512, 64000.0)
        assert (generator.on_mean, generator.off_mean, generator.start) == (1.2, 0.8, 5.0)

    def test_lsps_and_failure(self, case_study_config):
        """Test the protected LSP, its detours and the link failure."""
        config = case_study_config
        (lsp,) = config.lsps
        assert lsp.route == (1, 2, 3, 4, 5, 6)
        assert [(b.id, b.merge_start, b.route) for b in config.backups] == [
            (2, 2, (2, 7, 8, 9, 4, 5, 6)),
            (3, 3, (3, 8, 9, 5, 6)),
            (4, 3, (3, 10, 5, 6)),
        ]
        (failure,) = config.failures
        assert (failure.a, failure.b, failure.fail_at, failure.restore_at) == (2, 3, 10.029, 15.0)

    def test_dump_reads_back_equal(self, case_study_config):
        """Test the canonical text of a config parses to the same config."""
        assert parse_scenario(dump_scenario(case_study_config)) == case_study_config


@pytest.mark.unit
class TestParseOptions:
    """Test cases for optional fields and defaults."""

    def test_defaults(self):
        """Test seed, channel and timers default when omitted."""
        config = parse_scenario(MINIMAL)
        assert config.seed == 1
        assert config.control_channel == "shared"
        assert config.timers.hello_interval == 0.005

    def test_default_seed_from_settings(self, mocker):
        """Test a scenario without a seed takes DEFAULT_SEED from the settings."""
        from lspsim.conf import settings

        mocker.patch.object(settings, "DEFAULT_SEED", 9)
        assert parse_scenario(MINIMAL).seed == 9
        assert parse_scenario(MINIMAL.replace("end 1.5", "end 1.5\nseed 4")).seed == 4

    def test_timers_section(self):
        """Test timer overrides are applied and dumped."""
        config = parse_scenario(MINIMAL + "\n[timers]\nhello_interval 0.01\nhello_ack_timeout 0.03\n")
        assert config.timers.hello_interval == 0.01
        assert "hello_ack_timeout 0.03" in dump_scenario(config)

    def test_pareto_extras(self):
        """Test key=value generator options."""
        config = parse_scenario(MINIMAL + "\n[generators]\n1 pareto 1 2 200 64000 - - 0 shape=1.5\n")
        (generator,) = config.generators
        assert generator.kind is GeneratorKind.PARETO
        assert generator.shape == 1.5
        assert generator.scale is None
        assert parse_scenario(dump_scenario(config)) == config

    def test_optional_lsp_and_restore_dash(self):
        """Test the optional LSP flag and a '-' restore time."""
        text = MINIMAL + "\n[lsps]\n1 1 2 0 1 2 optional\n\n[failures]\n1 2 0.5 -\n"
        config = parse_scenario(text)
        assert config.lsps[0].optional
        assert config.failures[0].restore_at is None

    def test_policer_section(self):
        """Test policers are attached to existing generators."""
        text = MINIMAL + "\n[generators]\n1 CBR 1 2 100 8000 - - 0\n\n[policers]\ngenerator 1 4000 500\n"
        (policer,) = parse_scenario(text).policers
        assert (policer.target, policer.id, policer.rate, policer.bucket) == ("generator", 1, 4000.0, 500.0)

    def test_with_overrides_revalidates(self, case_study_config):
        """Test overriding the seed or end keeps the rest and validates."""
        config = case_study_config.with_overrides(seed=9, sim_end=16.0)
        assert (config.seed, config.sim_end) == (9, 16.0)
        assert config.links == case_study_config.links
        with pytest.raises(ValidationError):
            case_study_config.with_overrides(seed=-1)


@pytest.mark.unit
class TestParseErrors:
    """Test cases for scenario errors and their line numbers."""

    def test_no_nodes(self):
        """Test a scenario without nodes is rejected."""
        errors = errors_of("[sim]\nend 1\n")
        assert errors[0].message == "no nodes"

    def test_zero_nodes(self):
        """Test a node count of zero is rejected."""
        errors = errors_of("[sim]\nend 1\n[nodes]\n0\n")
        assert [str(error) for error in errors] == ["line 4: no nodes"]

    def test_missing_end(self):
        """Test [sim] end is required."""
        errors = errors_of("[nodes]\n2\n")
        assert [error.message for error in errors] == ["missing [sim] end"]

    def test_unknown_section_and_key(self):
        """Test unknown sections and keys are reported at their lines."""
        errors = errors_of("[sim]\nend 1\nspeed 3\n[nodes]\n2\n[extras]\n")
        assert [error.line for error in errors] == [3, 6]
        assert "speed" in errors[0].message

    def test_line_outside_section(self):
        """Test content before any section header is an error."""
        errors = errors_of("end 1\n[sim]\nend 1\n[nodes]\n1\n")
        assert errors[0].line == 1

    def test_bad_row_shape(self):
        """Test a link row with missing fields names its layout."""
        errors = errors_of(MINIMAL + "1 2 1000000\n")
        (error,) = errors
        assert error.line == 10
        assert "expected 4 fields" in error.message

    def test_validation_error_in_row(self):
        """Test field validation failures carry the row's line."""
        errors = errors_of(MINIMAL.replace("1 2 1000000 0.001", "1 1 1000000 0.001"))
        (error,) = errors
        assert error.line == 9
        assert "endpoints must differ" in error.message

    def test_reference_errors(self):
        """Test rows naming unknown nodes or links are rejected."""
        text = MINIMAL + "\n[routes]\n1 5 2\n\n[failures]\n2 3 0.5\n"
        errors = errors_of(text)
        assert [error.line for error in errors] == [12, 15]
        assert "unknown node 5" in errors[0].message
        assert "unknown link 2-3" in errors[1].message

    def test_backup_merge_points(self):
        """Test a backup whose merge points are not on its primary is rejected."""
        text = """
[sim]
end 1
[nodes]
3
[links]
1 2 1000000 0.001
2 3 1000000 0.001
1 3 1000000 0.001
[lsps]
1 1 2 0 1 2
[backups]
2 1 1 3 1 3
"""
        (error,) = errors_of(text)
        assert error.line == 13
        assert "merge points" in error.message

    def test_timer_ordering(self):
        """Test a state timeout shorter than the refresh period is rejected."""
        errors = errors_of(MINIMAL + "\n[timers]\nrefresh_period 10\nstate_timeout 5\n")
        (error,) = errors
        assert error.line == 12
        assert "state_timeout must exceed refresh_period" in error.message

    def test_unknown_timer(self):
        """Test an unknown timer name is rejected."""
        (error,) = errors_of(MINIMAL + "\n[timers]\nflush 1\n")
        assert "unknown timer" in error.message

    def test_generator_needs_on_off_means(self):
        """Test an ON/OFF source without means is rejected."""
        (error,) = errors_of(MINIMAL + "\n[generators]\n1 EXP_ON_OFF 1 2 512 64000 - - 0\n")
        assert "on_mean and off_mean" in error.message

    def test_unknown_generator_option(self):
        """Test unknown key=value options are rejected."""
        (error,) = errors_of(MINIMAL + "\n[generators]\n1 CBR 1 2 512 64000 - - 0 burst=3\n")
        assert "burst" in error.message

    def test_sim_value_errors_point_at_line(self):
        """Test a bad [sim] value is reported with its line."""
        errors = errors_of("[sim]\nend 1\ncontrol_channel radio\n[nodes]\n2\n")
        (error,) = errors
        assert error.line == 3
        assert error.message.startswith("control_channel:")

    def test_all_errors_reported_together(self):
        """Test every problem is collected before raising."""
        errors = errors_of("[sim]\nspeed 1\n[links]\n1 2\n")
        assert len(errors) == 4

    def test_missing_file(self, tmp_path):
        """Test reading a missing file is a config error."""
        with pytest.raises(ConfigError, match="cannot read"):
            load_scenario(tmp_path / "missing.scn")
