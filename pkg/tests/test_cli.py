"""End-to-end tests of the command-line interface."""

import os

import pytest

from turbine_lq.cli import main

FAST_SCENARIO = "\n".join(
    [
        "[wind]",
        "mean_mps = 11.0",
        "turbulence_intensity = 0.08",
        "duration_s = 30",
        "seed = 1",
        "[demand]",
        "constant = 2.6e6",
        "[simulation]",
        "controller = lq",
        "trim_s = 5",
    ]
)


@pytest.fixture()
def scenario(tmp_path):
    path = tmp_path / "fast.ini"
    path.write_text(FAST_SCENARIO + "\n")
    return str(path)


class TestRun:
    def test_writes_artifacts(self, tmp_path, scenario):
        out = str(tmp_path / "out1")
        assert main(["run", "--config", scenario, "--out", out]) == 0
        names = set(os.listdir(out))
        assert {
            "trace.csv",
            "metrics.csv",
            "power_tracking.png",
            "reference_tracking.png",
            "switching.png",
        } <= names

    def test_baseline_has_no_switching_plot(self, tmp_path, scenario):
        out = str(tmp_path / "outb")
        body = FAST_SCENARIO.replace("controller = lq", "controller = baseline")
        path = tmp_path / "base.ini"
        path.write_text(body + "\n")
        assert main(["run", "--config", str(path), "--out", out]) == 0
        names = set(os.listdir(out))
        assert "trace.csv" in names
        assert "switching.png" not in names

    def test_rejects_both_for_run(self, tmp_path, scenario):
        body = FAST_SCENARIO.replace("controller = lq", "controller = both")
        path = tmp_path / "both.ini"
        path.write_text(body + "\n")
        out = str(tmp_path / "outboth")
        assert main(["run", "--config", str(path), "--out", out]) == 2
        assert not os.path.exists(out)

    def test_deterministic_traces(self, tmp_path, scenario):
        out1 = str(tmp_path / "o1")
        out2 = str(tmp_path / "o2")
        assert main(["run", "--config", scenario, "--out", out1]) == 0
        assert main(["run", "--config", scenario, "--out", out2]) == 0
        a = open(os.path.join(out1, "trace.csv"), "rb").read()
        b = open(os.path.join(out2, "trace.csv"), "rb").read()
        assert a == b

    def test_seed_flag_changes_trace(self, tmp_path, scenario):
        out1 = str(tmp_path / "s1")
        out2 = str(tmp_path / "s2")
        assert main(["run", "--config", scenario, "--out", out1]) == 0
        assert main(["run", "--config", scenario, "--out", out2, "--seed", "99"]) == 0
        a = open(os.path.join(out1, "trace.csv"), "rb").read()
        b = open(os.path.join(out2, "trace.csv"), "rb").read()
        assert a != b


class TestFailureModes:
    def test_bad_config_exits_2_without_artifacts(self, tmp_path):
        bad = tmp_path / "bad.ini"
        bad.write_text("[wind]\nturbulence_intensity = 0.9\n")
        out = str(tmp_path / "never")
        assert main(["run", "--config", str(bad), "--out", out]) == 2
        assert not os.path.exists(out)

    def test_missing_config_exits_2(self, tmp_path):
        out = str(tmp_path / "never2")
        assert main(["run", "--config", "/nonexistent.ini", "--out", out]) == 2
        assert not os.path.exists(out)

    def test_unknown_verb_rejected(self):
        with pytest.raises(SystemExit):
            main(["frobnicate"])


class TestOtherVerbs:
    def test_compare(self, tmp_path, scenario):
        out = str(tmp_path / "cmp")
        assert main(["compare", "--config", scenario, "--out", out]) == 0
        names = set(os.listdir(out))
        assert {
            "baseline_trace.csv",
            "lq_trace.csv",
            "baseline_metrics.csv",
            "lq_metrics.csv",
            "comparison.txt",
            "comparison.png",
        } <= names
        text = open(os.path.join(out, "comparison.txt")).read()
        assert "torque DEL" in text and "pitch DEL" in text

    def test_design_report(self, tmp_path):
        out = str(tmp_path / "design")
        assert main(["design", "--out", out]) == 0
        body = open(os.path.join(out, "design_report.txt")).read()
        assert "closed-loop radius" in body
        assert "dare residual" in body
        assert "gain matrix K" in body

    def test_tables(self, tmp_path):
        out = str(tmp_path / "tab")
        assert main(["tables", "--out", out]) == 0
        header = open(os.path.join(out, "tables.csv")).readline()
        assert "power_w" in header and "omega_sp" in header

    def test_trim_flag(self, tmp_path, scenario):
        out = str(tmp_path / "trim")
        assert main(["run", "--config", scenario, "--out", out, "--trim", "0"]) == 0
