import json
import subprocess
import sys

import numpy as np
import pytest

from ricci_qc.cli import EXIT_FAILED, EXIT_INPUT, EXIT_NUMERIC, EXIT_OK, main
from ricci_qc.scenario import read_csv


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def report(out: str) -> dict:
    return json.loads(out[out.index("{"):])


class TestFlow:
    def test_a5_conserved_column(self, capsys, tmp_path):
        code, out, _ = run(capsys, "flow", "--class", "A5", "--init", "2,3,1,1", "--t-end", "100",
                           "--out", str(tmp_path))
        assert code == EXIT_OK
        header, data = read_csv(tmp_path / "conserved.csv")
        assert header == ["t", "AB", "C"]
        assert np.max(np.abs(data[:, 1] - 6.0)) < 1e-8 * 6
        header, traj = read_csv(tmp_path / "trajectory.csv")
        assert header == ["t", "A", "B", "C", "D"] and traj[-1, 0] == 100.0
        rep = report(out)
        assert rep["drift"]["max"] < 1e-8
        assert (tmp_path / "flow.json").exists()

    def test_a1_constant(self, capsys, tmp_path):
        code, _, _ = run(capsys, "flow", "--class", "A1", "--init", "1,2,3,4", "--out", str(tmp_path))
        assert code == EXIT_OK
        _, traj = read_csv(tmp_path / "trajectory.csv")
        assert np.all(traj[:, 1:] == [1.0, 2.0, 3.0, 4.0])

    def test_a7i_linear_growth_reported(self, capsys):
        code, out, _ = run(capsys, "flow", "--class", "A7i", "--init", "1,1,1,1", "--t-end", "1e4")
        assert code == EXIT_OK
        checks = {c["component"]: c for c in report(out)["asymptotics"]}
        assert checks["A"]["descriptor"] == {"type": "LinearGrowth", "slope": 4.0}
        assert checks["A"]["residual"] < 0.05

    def test_closed_form_path_for_long_runs(self, capsys):
        code, out, _ = run(capsys, "flow", "--class", "A4", "--t-end", "1e8")
        assert code == EXIT_OK
        assert report(out)["verdicts"]["path"] == "closed-form"

    def test_csv_byte_identical_across_runs(self, capsys, tmp_path):
        for d in ("r1", "r2"):
            run(capsys, "flow", "--class", "A8", "--init", "1,2,0.5,1", "--t-end", "50",
                "--out", str(tmp_path / d))
        for name in ("trajectory.csv", "conserved.csv"):
            assert (tmp_path / "r1" / name).read_bytes() == (tmp_path / "r2" / name).read_bytes()

    def test_numerical_failure_keeps_partial_output(self, capsys, tmp_path):
        cfg = tmp_path / "s.json"
        cfg.write_text(json.dumps({"class": "A7i", "init": [1, 1, 1, 1],
                                   "integrator": {"t_end": 1000, "max_steps": 10}}))
        code, out, _ = run(capsys, "flow", "--config", str(cfg), "--out", str(tmp_path))
        assert code == EXIT_NUMERIC
        assert report(out)["status"] == "numerical-failure"
        _, traj = read_csv(tmp_path / "trajectory.csv")
        assert 0 < traj[-1, 0] < 1000


class TestQc:
    def test_a3_example(self, capsys, tmp_path):
        code, out, _ = run(capsys, "qc", "--class", "A3", "--k", "1", "--init", "1,2,5,1",
                           "--init-bar", "2,1,5,7", "--out", str(tmp_path))
        assert code == EXIT_OK
        v = report(out)["verdicts"]
        assert v["analytic"] is True and v["numeric"] == "Converges"
        header, data = read_csv(tmp_path / "norm.csv")
        assert header == ["t", "A", "B", "C", "D", "norm"]
        assert data[-1, -1] < 1e-2

    def test_a8_excluded_frame(self, capsys):
        code, out, _ = run(capsys, "qc", "--class", "A8", "--init", "1,1,1,1",
                           "--init-bar", "1,1,1,1", "--frame", "a=0.5")
        v = report(out)["verdicts"]
        assert code == EXIT_OK
        assert v["analytic"] is False and v["numeric"] == "Diverges"

    def test_identical(self, capsys):
        code, out, _ = run(capsys, "qc", "--class", "A6", "--init", "1,2,3,4", "--init-bar",
                           "1,2,3,4")
        v = report(out)["verdicts"]
        assert v["analytic"] is True and v["numeric"] == "Converges"

    def test_config_file_with_frames(self, capsys, tmp_path):
        lam = np.eye(4)
        lam[3, 3 - 1] = 0.25
        cfg = tmp_path / "s.json"
        cfg.write_text(json.dumps({
            "class": "A9ii", "params": {"a3": 1.0}, "init": [1, 1, 2, 1], "init_bar": [1, 1, 2, 1],
            "frames": {"lam": lam.tolist(), "lam_prime": np.eye(4).tolist()},
            "qc": {"epsilon": 0.01}}))
        code, out, _ = run(capsys, "qc", "--config", str(cfg))
        v = report(out)["verdicts"]
        assert code == EXIT_OK and v["frame"] == {"a": 0.25}
        assert v["analytic"] is False and v["numeric"] == "Diverges"

    def test_missing_init_bar(self, capsys):
        code, _, err = run(capsys, "qc", "--class", "A5", "--init", "1,1,1,1")
        assert code == EXIT_INPUT and "gbar" in err


class TestDim:
    @pytest.mark.parametrize("argv,line", [
        (["--class", "A7i"], "probe=3 paper=3 PASS"),
        (["--class", "A1"], "probe=0 paper=0 PASS"),
        (["--class", "A9ii", "--a3", "1", "--init", "1,1,2,1"], "probe=2 paper=2 PASS"),
    ])
    def test_lines(self, capsys, argv, line):
        code, out, _ = run(capsys, "dim", *argv)
        assert code == EXIT_OK
        assert out.strip().splitlines()[0] == line


class TestValidate:
    def test_selected_criteria_pass(self, capsys):
        code, out, _ = run(capsys, "validate", "--only", "1", "--only", "7")
        assert code == EXIT_OK
        assert "[PASS] 1." in out and "[PASS] 7." in out

    def test_injected_conserved_fault_fails_drift_check(self, capsys):
        code, out, _ = run(capsys, "validate", "--only", "2", "--inject-fault", "conserved")
        assert code == EXIT_FAILED
        assert "[FAIL] 2." in out

    def test_loose_tolerance_mode(self, capsys):
        code, out, _ = run(capsys, "validate", "--only", "1", "--tol", "1e-4")
        assert code == EXIT_OK
        assert "(tol 1e-03)" in out

    def test_report_written(self, capsys, tmp_path):
        run(capsys, "validate", "--only", "5", "--out", str(tmp_path))
        rep = json.loads((tmp_path / "validate.json").read_text())
        assert rep["verdicts"]["5"]["pass"] is True

    def test_bad_thread_count(self, capsys, monkeypatch):
        monkeypatch.setenv("RICCI_QC_THREADS", "0")
        code, _, err = run(capsys, "validate", "--only", "7")
        assert code == EXIT_INPUT and "RICCI_QC_THREADS" in err


class TestInputErrors:
    @pytest.mark.parametrize("argv", [
        ["flow"],
        ["flow", "--class", "A10"],
        ["flow", "--class", "A9ii", "--a3", "1", "--init", "1,2,1,1"],
        ["flow", "--class", "A2iv", "--k", "1"],
        ["flow", "--config", "/nonexistent/scenario.json"],
    ])
    def test_exit_code_2(self, capsys, argv):
        code, _, err = run(capsys, *argv)
        assert code == EXIT_INPUT and "error" in err

    def test_argparse_errors_exit_2(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["flow", "--init", "1,2"])
        assert info.value.code == 2


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ricci_qc.cli", "dim", "--class", "A4"],
                          capture_output=True, text=True, timeout=60)
    assert proc.returncode == 0
    assert proc.stdout.strip() == "probe=1 paper=1 PASS"
