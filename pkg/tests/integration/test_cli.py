"""
Integration test: the command-line runner end to end on small sizes.
"""

import json
from pathlib import Path

import pytest

from run_lab import cli_dispatch


REPO_ROOT = Path(__file__).resolve().parents[2]


@pytest.fixture(autouse=True)
def in_tmp(tmp_path, monkeypatch):
    """Run every command from an empty directory (default outputs land there)."""
    monkeypatch.chdir(tmp_path)
    return tmp_path


class TestCommands:
    """Every command runs and writes its result file."""

    def test_hitting_tail(self, in_tmp, capsys):
        out = in_tmp / "tail.csv"
        assert cli_dispatch(["hitting-tail", "--n", "2", "--m-max", "4", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "m,tail"
        assert lines[3] == "2,0.75"
        assert lines[4] == "3,0.4375"
        assert "tail[2]=0.75" in capsys.readouterr().out

    def test_stabilize(self, in_tmp):
        out = in_tmp / "stab.json"
        code = cli_dispatch(["stabilize", "--sigma", '[2,0,"s"]', "--seed", "5", "--out", str(out)])
        assert code == 0
        result = json.loads(out.read_text())
        assert result["n"] == 3
        assert result["initial"] == [2, 0, "s"]
        assert all(value in (0, "s") for value in result["final"])
        kept = sum(1 for value in result["final"] if value == "s")
        assert kept + sum(result["exits"].values()) == 3

    def test_chain(self, in_tmp):
        out = in_tmp / "chain.csv"
        assert cli_dispatch(["chain", "--n", "4", "--t", "6", "--include-configs", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "t,count,exits_left,exits_right,exits_total,config"
        assert len(lines) == 8

    def test_sample_stationary(self, in_tmp):
        out = in_tmp / "pi.csv"
        assert cli_dispatch(["sample-stationary", "--n", "3", "--reps", "10", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "replica,count,config"
        assert len(lines) == 11

    def test_density_default_output(self, in_tmp):
        assert cli_dispatch(["density", "--n", "2", "--reps", "200"]) == 0
        assert (in_tmp / "outputs" / "density.csv").exists()
        assert list((in_tmp / "outputs" / "logs").glob("arwlab_*.log"))

    def test_density_general_topology(self, in_tmp):
        out = in_tmp / "triangle.csv"
        config = REPO_ROOT / "config" / "experiments" / "general_triangle.json"
        assert cli_dispatch(["density", "--config", str(config), "--reps", "50", "--out", str(out)]) == 0
        assert out.read_text().startswith("n,lambda,reps,rho_hat")

    def test_mixing_sweep_writes_plot_data(self, in_tmp):
        out = in_tmp / "sweep.csv"
        code = cli_dispatch([
            "mixing-sweep", "--n", "3", "--t", "0:6:2", "--reps", "60", "--seed", "4",
            "--out", str(out),
        ])
        assert code == 0
        assert out.read_text().splitlines()[0].startswith("n,lambda,t,lower,upper")
        assert (in_tmp / "sweep_plot.csv").read_text().startswith("n,t,t_over_n,series,value,clamped")

    def test_exit_prob(self, in_tmp):
        out = in_tmp / "exit.csv"
        code = cli_dispatch([
            "exit-prob", "--n", "6", "--reps", "40", "--density-reps", "40", "--out", str(out),
        ])
        assert code == 0
        header = out.read_text().splitlines()[0].split(",")
        assert {"frequency", "hypothesis_rate", "rho_hat"} <= set(header)

    def test_decay(self, in_tmp):
        out = in_tmp / "decay.csv"
        assert cli_dispatch(["decay", "--n-grid", "4,6", "--reps", "30", "--out", str(out)]) == 0
        assert len(out.read_text().splitlines()) == 3

    def test_verify(self, in_tmp):
        out = in_tmp / "abelian.json"
        code = cli_dispatch(["verify", "--suite", "abelian", "--instances", "8", "--out", str(out)])
        assert code == 0
        verdict = json.loads(out.read_text())
        assert verdict["suite"] == "abelian"
        assert verdict["instances"] == 8
        assert verdict["first_failure"] is None
        assert (in_tmp / "abelian.md").read_text().startswith("# Verification Report")


class TestReproducibility:
    """Same seed, same bytes; worker count never changes results."""

    def _sweep(self, out, *extra):
        argv = [
            "mixing-sweep", "--n", "3", "--t", "0:5", "--reps", "40",
            "--seed", "9", "--driving", "uniform", "--out", str(out), *extra,
        ]
        assert cli_dispatch(argv) == 0
        return out.read_bytes()

    def test_rerun_is_identical(self, in_tmp):
        assert self._sweep(in_tmp / "a.csv") == self._sweep(in_tmp / "b.csv")

    def test_threads_do_not_change_output(self, in_tmp):
        serial = self._sweep(in_tmp / "serial.csv")
        parallel = self._sweep(in_tmp / "parallel.csv", "--threads", "2")
        assert serial == parallel


class TestExitCodes:
    """Usage and validation errors exit 1, runtime failures exit 2."""

    @pytest.mark.parametrize("argv", [
        [],
        ["teleport"],
        ["density", "--n", "3", "--bogus"],
        ["density", "--n", "three"],
        ["density", "--n", "3", "--lambda", "0"],
        ["density"],
        ["hitting-tail", "--n", "2"],
        ["verify", "--suite", "nonsense"],
        ["stabilize", "--sigma", "[1, -4]"],
        ["stabilize", "--sigma", "[1,0]", "--n", "3"],
        ["cutoff", "--n-grid", "4", "--epsilon", "0.7"],
        ["mixing-sweep", "--n", "3", "--t", "0:2", "--reps", "5", "--mode", "ephemeral"],
    ])
    def test_usage_errors(self, argv, capsys):
        assert cli_dispatch(argv) == 1
        assert "✗" in capsys.readouterr().err

    def test_unknown_json_key(self, in_tmp):
        config = in_tmp / "bad.json"
        config.write_text(json.dumps({"command": "density", "n": 3, "bogus": 1}))
        assert cli_dispatch(["density", "--config", str(config)]) == 1

    def test_command_mismatch(self, in_tmp):
        config = in_tmp / "chain.json"
        config.write_text(json.dumps({"command": "chain", "n": 3, "t": 2}))
        assert cli_dispatch(["density", "--config", str(config)]) == 1

    def test_missing_config_file(self, in_tmp):
        assert cli_dispatch(["density", "--config", str(in_tmp / "absent.json")]) == 1

    def test_flags_override_config(self, in_tmp):
        config = in_tmp / "tail.json"
        config.write_text(json.dumps({"command": "hitting-tail", "n": 1, "m_max": 2}))
        out = in_tmp / "tail.csv"
        assert cli_dispatch(["hitting-tail", "--config", str(config), "--n", "2", "--out", str(out)]) == 0
        assert out.read_text().splitlines()[3] == "2,0.75"

    def test_runtime_error(self, in_tmp):
        # a two-point grid cannot bracket both crossings
        code = cli_dispatch([
            "cutoff", "--n-grid", "4", "--t", "0,1", "--reps", "20", "--point-estimates",
            "--out", str(in_tmp / "cutoff.csv"),
        ])
        assert code == 2

    def test_help(self):
        assert cli_dispatch(["--help"]) == 0
