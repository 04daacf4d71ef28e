"""
Unit tests for the command-line interface.
"""

import pandas as pd
import pytest

from lspsim.cli import build_parser, main
from lspsim.errors import EXIT_CONFIG_ERROR, EXIT_OK, EXIT_SIGNALING_FAILURE

UNREACHABLE_LSP = """
[lsps]
1 1 3 20000000 1 2 3
"""


@pytest.mark.unit
class TestParserArguments:
    """Test cases for argument parsing."""

    def test_seed_range(self):
        """Test A-B seed ranges are inclusive."""
        args = build_parser().parse_args(["sweep", "x.scn", "--seeds", "3-5"])
        assert list(args.seeds) == [3, 4, 5]

    def test_single_seed(self):
        """Test a lone seed is a range of one."""
        args = build_parser().parse_args(["sweep", "x.scn", "--seeds", "8"])
        assert list(args.seeds) == [8]

    @pytest.mark.parametrize("seeds", ["5-2", "a-b", "-3"])
    def test_bad_seed_range(self, seeds):
        """Test malformed seed ranges are usage errors."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["sweep", "x.scn", "--seeds", seeds])

    def test_command_required(self):
        """Test a subcommand must be given."""
        with pytest.raises(SystemExit):
            build_parser().parse_args([])


@pytest.mark.unit
class TestCheckCommand:
    """Test cases for ``lspsim check``."""

    def test_check_case_study(self, case_study_path, capsys):
        """Test a valid scenario is summarised."""
        assert main(["check", str(case_study_path)]) == EXIT_OK
        out = capsys.readouterr().out
        assert out.strip() == "ok: 10 nodes, 13 links, 1 generators, 1 LSPs, 3 backups, 1 failures"

    def test_check_invalid_scenario(self, tmp_path, capsys):
        """Test an invalid scenario exits with the config error code."""
        path = tmp_path / "bad.scn"
        path.write_text("[sim]\nend 1\n")
        assert main(["check", str(path)]) == EXIT_CONFIG_ERROR
        assert "invalid scenario: no nodes" in capsys.readouterr().err

    def test_check_missing_file(self, tmp_path, capsys):
        """Test a missing scenario file is a config error."""
        assert main(["check", str(tmp_path / "none.scn")]) == EXIT_CONFIG_ERROR
        assert "cannot read" in capsys.readouterr().err


@pytest.mark.unit
class TestRunCommand:
    """Test cases for ``lspsim run``."""

    def test_run_writes_results(self, line_path, output_dir, capsys):
        """Test a run writes the CSV and summary and prints the summary."""
        assert main(["run", str(line_path), "--out-dir", str(output_dir)]) == EXIT_OK
        out = capsys.readouterr().out
        assert out.startswith("seed=7\n")
        assert "runtime=" in out
        summary = (output_dir / "summary.txt").read_text()
        assert summary.splitlines()[0] == "seed=7"
        assert "runtime" not in summary
        frame = pd.read_csv(output_dir / "packets.csv")
        assert len(frame) > 0
        assert not (output_dir / "trace.txt").exists()

    def test_run_seed_override(self, line_path, output_dir, capsys):
        """Test --seed replaces the scenario seed."""
        main(["run", str(line_path), "--seed", "11", "--summary", "--out-dir", str(output_dir)])
        assert (output_dir / "summary.txt").read_text().startswith("seed=11\n")
        assert not (output_dir / "packets.csv").exists()

    def test_run_trace_and_plots(self, line_path, output_dir):
        """Test --trace and --plot add the trace and the figures."""
        main(["run", str(line_path), "--csv", "--trace", "--plot", "--out-dir", str(output_dir)])
        trace = (output_dir / "trace.txt").read_text().splitlines()
        assert trace[0].split()[2] == "GENERATE_HELLO"
        assert (output_dir / "delay.png").stat().st_size > 0
        assert (output_dir / "jitter.png").stat().st_size > 0
        assert not (output_dir / "summary.txt").exists()

    def test_signaling_failure_exit_code(self, line_scenario_text, tmp_path, output_dir, capsys):
        """Test a mandatory LSP that cannot come up exits with code 2."""
        path = tmp_path / "unreachable.scn"
        path.write_text(line_scenario_text + UNREACHABLE_LSP)
        assert main(["run", str(path), "--out-dir", str(output_dir)]) == EXIT_SIGNALING_FAILURE
        err = capsys.readouterr().err
        assert "signaling failure: LSP 1" in err
        assert "lsp.1.state=FAILED" in err


@pytest.mark.unit
class TestSweepAndPlotCommands:
    """Test cases for ``lspsim sweep`` and ``lspsim plot``."""

    def test_sweep_writes_one_row_per_seed(self, line_path, output_dir, capsys):
        """Test a sweep runs each seed and writes sweep.csv."""
        args = ["sweep", str(line_path), "--seeds", "1-3", "--end", "1.0", "--out-dir", str(output_dir)]
        assert main(args) == EXIT_OK
        frame = pd.read_csv(output_dir / "sweep.csv")
        assert frame["seed"].tolist() == [1, 2, 3]
        assert (frame["sent"] > 0).all()
        assert "seed" in capsys.readouterr().out

    def test_sweep_rejects_invalid_scenario(self, tmp_path, output_dir):
        """Test a sweep validates the scenario before running."""
        path = tmp_path / "bad.scn"
        path.write_text("[nodes]\n2\n")
        assert main(["sweep", str(path), "--seeds", "1-2", "--out-dir", str(output_dir)]) == EXIT_CONFIG_ERROR
        assert not (output_dir / "sweep.csv").exists()

    def test_plot_from_csv(self, line_path, output_dir, capsys):
        """Test figures are drawn from an existing packets.csv."""
        main(["run", str(line_path), "--csv", "--out-dir", str(output_dir)])
        capsys.readouterr()
        figures = output_dir / "figures"
        assert main(["plot", str(output_dir / "packets.csv"), "--out-dir", str(figures), "--flow", "1"]) == EXIT_OK
        assert capsys.readouterr().out.split() == [str(figures / "delay.png"), str(figures / "jitter.png")]

    def test_plot_missing_csv(self, tmp_path, capsys):
        """Test a missing CSV is reported as an error."""
        assert main(["plot", str(tmp_path / "none.csv"), "--out-dir", str(tmp_path)]) == EXIT_CONFIG_ERROR
        assert "cannot read" in capsys.readouterr().err

    def test_sweep_through_broker(self, line_path, output_dir, mocker):
        """Test a non-eager sweep dispatches one group and sorts its rows by seed."""
        from lspsim.conf import settings

        mocker.patch.object(settings, "CELERY_TASK_ALWAYS_EAGER", False)
        group = mocker.patch("celery.group")
        group.return_value.apply_async.return_value.get.return_value = [
            {"seed": 2, "sent": 10},
            {"seed": 1, "sent": 12},
        ]
        assert main(["sweep", str(line_path), "--seeds", "1-2", "--out-dir", str(output_dir)]) == EXIT_OK
        group.assert_called_once()
        frame = pd.read_csv(output_dir / "sweep.csv")
        assert frame.to_dict("records") == [{"seed": 1, "sent": 12}, {"seed": 2, "sent": 10}]
