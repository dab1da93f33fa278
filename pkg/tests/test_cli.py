import json
import subprocess
import sys

import mpmath
import pytest

from polygamma_lab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestEval:
    def test_digamma_one(self, capsys):
        code, out, _ = run(capsys, "eval", "digamma", "1")
        value, err = map(float, out.split())
        assert code == 0
        assert abs(value + float(mpmath.euler)) < 1e-14
        assert 0 <= err < 1e-12

    def test_polygamma_order(self, capsys):
        code, out, _ = run(capsys, "eval", "polygamma", "0.5", "--n", "1")
        assert code == 0
        assert float(out.split()[0]) == pytest.approx(float(mpmath.pi**2 / 2), rel=1e-14)

    def test_phi_theta(self, capsys):
        code, out, _ = run(capsys, "eval", "phi_theta", "1e6", "--theta", "2")
        assert code == 0 and abs(float(out.split()[0]) - float(mpmath.log(2))) < 1e-4

    def test_f_i(self, capsys):
        code, out, _ = run(capsys, "eval", "f_i", "0.5", "--i", "2")
        ref = mpmath.psi(2, 1.5) - 0.5 * mpmath.psi(3, 1.25)
        assert code == 0 and float(out.split()[0]) == pytest.approx(float(ref), rel=1e-12)

    def test_domain_error_exit_3(self, capsys):
        code, _, err = run(capsys, "eval", "phi", "-1")
        assert code == 3 and "positive" in err

    def test_pole_exit_3(self, capsys):
        assert run(capsys, "eval", "digamma", "-2")[0] == 3

    def test_missing_theta_is_usage(self, capsys):
        code, _, err = run(capsys, "eval", "phi_theta", "1")
        assert code == 2 and "usage" in err

    @pytest.mark.parametrize("argv", [[], ["eval"], ["eval", "nosuch", "1"], ["eval", "phi", "abc"], ["frob"]])
    def test_usage_errors(self, capsys, argv):
        assert run(capsys, *argv)[0] == 2

    def test_env_tolerance(self, capsys, monkeypatch):
        monkeypatch.setenv("POLYGAMMA_LAB_TOL", "1e-6")
        code, out, _ = run(capsys, "eval", "digamma", "3")
        assert code == 0
        assert float(out.split()[0]) == pytest.approx(float(mpmath.psi(0, 3)), abs=1e-6)

    def test_bad_env_tolerance(self, capsys, monkeypatch):
        monkeypatch.setenv("POLYGAMMA_LAB_TOL", "-1")
        assert run(capsys, "eval", "digamma", "3")[0] == 2


class TestVerify:
    def test_sandwich_exit_0(self, capsys):
        code, out, _ = run(capsys, "verify", "--claims", "thm3.sandwich", "--no-scans")
        assert code == 0 and "2/2 checks passed" in out

    def test_unknown_claim(self, capsys):
        assert run(capsys, "verify", "--claims", "bogus")[0] == 2

    def test_failure_exit_1(self, capsys):
        # a negative tolerance makes every strict comparison fail
        code, _, _ = run(capsys, "verify", "--claims", "thm1.monotone", "--no-scans", "--tol", "-1")
        assert code == 1

    def test_json_out_file(self, capsys, tmp_path):
        path = tmp_path / "r.json"
        code, out, _ = run(capsys, "verify", "--claims", "thm5", "--format", "json",
                           "--out", str(path), "--normalize-timestamp", "--no-scans")
        assert code == 0 and out == ""
        d = json.loads(path.read_text())
        assert d["timestamp"] == "1970-01-01T00:00:00+00:00"
        assert {o["claim_id"] for o in d["outcomes"]} >= {"thm5.monotone", "thm5.value_at_one"}

    def test_csv(self, capsys):
        code, out, _ = run(capsys, "verify", "--claims", "thm3.counterexample", "--format", "csv", "--no-scans")
        assert code == 0 and out.splitlines()[1].startswith("thm3.counterexample,True,")

    def test_grid_override(self, capsys):
        code, out, _ = run(capsys, "verify", "--claims", "thm1.concave", "--count", "50", "--no-scans")
        assert code == 0 and "samples=48" in out

    def test_bad_grid_is_usage(self, capsys):
        assert run(capsys, "verify", "--claims", "thm1", "--lo", "5", "--hi", "1")[0] == 2


class TestExplore:
    def test_h_text(self, capsys):
        code, out, _ = run(capsys, "explore", "h", "--count", "300")
        assert code == 0 and out.startswith("conj.h.shape consistent")

    def test_gi_csv(self, capsys):
        code, out, _ = run(capsys, "explore", "gi", "--i-max", "2", "--count", "100", "--format", "csv")
        lines = out.splitlines()
        assert code == 0 and lines[0] == "claim_id,x,value,d1,d2" and len(lines) == 201

    def test_open_params_file(self, capsys, tmp_path):
        path = tmp_path / "p.jsonl"
        rows = [
            {"i": 1, "k": 1, "alpha": 1, "beta": 0, "delta": 1, "lambda": 0.5, "mu": 1, "tau": 0.5},
            {"i": 2, "k": 2, "alpha": 1, "beta": 1, "delta": 1, "lambda": 1, "mu": 2, "tau": 1},
        ]
        path.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
        code, out, _ = run(capsys, "explore", "open", "--params-file", str(path), "--format", "json")
        scans = json.loads(out)
        assert code == 0 and [s["claim_id"] for s in scans] == ["open.phi_ik[0]", "open.phi_ik[1]"]

    def test_bad_params_file(self, capsys, tmp_path):
        path = tmp_path / "p.jsonl"
        path.write_text('{"i": 1}\n')
        assert run(capsys, "explore", "open", "--params-file", str(path))[0] == 2

    def test_missing_params_file(self, capsys, tmp_path):
        assert run(capsys, "explore", "open", "--params-file", str(tmp_path / "none"))[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "polygamma_lab", "eval", "digamma", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("-0.57721566490153")
