# coding: utf8
"""Tests for the dcgrid command line"""
import json
import os
from unittest.mock import patch

from dcgrid.cli import EXIT_ANALYSIS, EXIT_INPUT, EXIT_OK, build_parser, main
from dcgrid.errors import StepSizeUnderflow

from .mockup import preset_text, scenario_path


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestCheck:
    def test_report(self, tmp_path, capsys):
        target = str(tmp_path / "report.json")
        assert main(["check", scenario_path("two_branch.toml"), "--json", target]) == EXIT_OK
        out = capsys.readouterr().out
        assert "large-signal stable: yes" in out
        assert "small-signal stable: yes" in out
        with open(target) as file:
            data = json.load(file)
        assert data["large_signal"] is True
        assert data["attractors"] == [0]

    def test_checklist(self, capsys):
        args = ["check", scenario_path("two_branch.toml"), "--p-l", "800", "805", "810", "825"]
        assert main(args) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].split()[:2] == ["P", "L"], "Header row"
        assert len(lines) == 6, "Header, rule and one row per power"
        assert lines[2].split()[1:3] == ["yes", "yes"]
        assert lines[4].split()[1:3] == ["no", "-"]

    def test_invalid_scenario(self, capsys):
        assert main(["check", scenario_path("broken.toml")]) == EXIT_INPUT
        assert "branch[0].r_pd" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert main(["check", str(tmp_path / "missing.toml")]) == EXIT_INPUT


class TestCommands:
    def test_simulate(self, tmp_path, capsys):
        scenario = _write(tmp_path, "vii.toml", preset_text("vii"))
        target = str(tmp_path / "trajectory.csv")
        assert main(["simulate", scenario, "--csv", target]) == EXIT_OK
        assert os.path.exists(target)
        assert "Verdict" in capsys.readouterr().out

    def test_sweep(self, tmp_path, capsys):
        stem = str(tmp_path / "region.csv")
        assert main(["sweep", scenario_path("small_sweep.toml"), "--csv", stem, "--workers", "2"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "large_signal.Stable: 4" in out
        assert os.path.exists(str(tmp_path / "region.large_signal.csv"))
        assert not os.path.exists(str(tmp_path / "region.gp"))

    def test_rlc_bench(self, tmp_path, capsys):
        target = str(tmp_path / "rlc.json")
        assert main(["rlc-bench", "--samples", "50", "--json", target]) == EXIT_OK
        assert "Brayton-Moser" in capsys.readouterr().out
        with open(target) as file:
            assert json.load(file)["mismatches"] == []

    def test_compare_needs_proposed(self, tmp_path, capsys):
        text = preset_text("viii").replace('controller = "proposed"', 'controller = "droop"\nr_pd = 1.0')
        scenario = _write(tmp_path, "droop.toml", text)
        assert main(["compare-controllers", scenario]) == EXIT_ANALYSIS
        assert "analysis error" in capsys.readouterr().err

    def test_gen_examples(self, tmp_path, capsys):
        directory = str(tmp_path / "out")
        assert main(["gen-examples", "--dir", directory]) == EXIT_OK
        assert len(os.listdir(directory)) == 7
        assert len(capsys.readouterr().out.splitlines()) == 7

    def test_parser(self):
        args = build_parser().parse_args(["-vv", "sweep", "spec.toml", "--gnuplot"])
        assert args.verbose == 2
        assert args.gnuplot
        assert args.workers is None

    def test_solver_failure(self, tmp_path, capsys):
        scenario = _write(tmp_path, "vii.toml", preset_text("vii"))
        failure = StepSizeUnderflow("integration failed at t=3.5: step size too small", time=3.5)
        with patch("dcgrid.sweep.simulate", side_effect=failure):
            assert main(["simulate", scenario]) == EXIT_ANALYSIS
        assert "step size too small" in capsys.readouterr().err
