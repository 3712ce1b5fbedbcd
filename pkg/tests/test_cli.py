"""Command-line behavior: exit codes, determinism, diagnostics."""

import json
import subprocess
import sys

import pytest

M1 = {"atoms": [["1", "1"], ["-1", "1"]], "lebesgue": True,
      "bernoulli": None, "scale": "1"}
M2 = {"atoms": [["1", "1"], ["-1", "1"]], "lebesgue": False,
      "bernoulli": {"kind": "geometric", "base": 3, "scale": "1"},
      "scale": "1"}
FACT = {"atoms": [], "lebesgue": False,
        "bernoulli": {"kind": "factorial", "base": 3, "scale": "1"},
        "scale": "1"}
EXPL = {"atoms": [], "lebesgue": False,
        "bernoulli": {"kind": "explicit", "values": ["1/2", "1/4"],
                      "scale": "1"},
        "scale": "1"}


def run_cli(*argv):
    proc = subprocess.run([sys.executable, "-m", "tau3.cli", *argv],
                          capture_output=True, text=True, timeout=240)
    return proc.returncode, proc.stdout, proc.stderr


@pytest.fixture
def specs(tmp_path):
    paths = {}
    for name, doc in (("m1", M1), ("m2", M2), ("fact", FACT),
                      ("expl", EXPL)):
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(doc))
        paths[name] = str(p)
    return paths


class TestEval:
    def test_value_at_zero(self, specs):
        code, out, _ = run_cli("eval", "--measure", specs["expl"], "--t", "0")
        assert code == 0
        assert "value: [1, 1]" in out
        assert "exact" in out

    def test_huge_power_argument(self, specs):
        code, out, _ = run_cli("eval", "--measure", specs["fact"],
                               "--t-power", "1,3,5!")
        assert code == 0
        assert "status: evaluated" in out

    def test_malformed_spec_diagnostics(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"atoms": [[,]]}')
        code, _, err = run_cli("eval", "--measure", str(bad), "--t", "0")
        assert code == 1
        assert "line 1" in err and "column" in err

    def test_float_parameters_rejected(self, specs):
        code, _, err = run_cli("eval", "--measure", specs["expl"],
                               "--t", "0.5e1x")
        assert code == 1


class TestConverge:
    def test_factorial_family_converges(self, specs):
        code, out, _ = run_cli(
            "converge", "--measure", specs["fact"], "--family", "factorial",
            "--lambda", "1", "--n", "3..6", "--tol", "1e-6")
        assert code == 0
        assert "conclusion: ConvergesTo1" in out

    def test_bounded_away_exit(self, specs):
        code, out, _ = run_cli(
            "converge", "--measure", specs["fact"], "--family", "factorial",
            "--lambda", "1/3", "--n", "3..6")
        assert code == 0
        assert "conclusion: BoundedAwayFrom1" in out
        assert "gap: 1/2" in out

    def test_undetermined_exit(self, specs):
        code, out, _ = run_cli(
            "converge", "--measure", specs["fact"], "--family", "factorial",
            "--lambda", "1/2", "--n", "3..6")
        assert code == 2
        assert "conclusion: Undetermined" in out

    def test_explicit_points(self, specs, tmp_path):
        pair = tmp_path / "pair.json"
        pair.write_text(json.dumps({
            "atoms": [["1", "1/2"], ["-1", "1/2"]], "lebesgue": False,
            "bernoulli": None, "scale": "1"}))
        code, out, _ = run_cli("converge", "--measure", str(pair),
                               "--points", "1,2,3,4")
        assert code == 0
        assert "conclusion: ConvergesTo1" in out

    def test_report_determinism(self, specs, tmp_path):
        p = tmp_path / "rep.txt"
        args = ("converge", "--measure", specs["fact"], "--family",
                "factorial", "--lambda", "1", "--n", "3..5",
                "--out", str(p))
        run_cli(*args)
        first = p.read_bytes()
        run_cli(*args)
        assert p.read_bytes() == first


class TestClassify:
    def test_usual(self, specs):
        code, out, _ = run_cli("classify", "--measure", specs["m2"])
        assert code == 0
        assert "completion: UsualTopologyReal" in out

    def test_undetermined(self, tmp_path):
        p = tmp_path / "odd.json"
        p.write_text(json.dumps({
            "atoms": [], "lebesgue": False,
            "bernoulli": {"kind": "geometric", "base": 7, "scale": "1"},
            "scale": "1"}))
        code, out, _ = run_cli("classify", "--measure", str(p))
        assert code == 2
        assert "Undetermined" in out


class TestClassOp:
    def test_series(self, specs):
        code, out, _ = run_cli("class-op", "--op", "series",
                               "--a", specs["m2"])
        assert code == 0
        assert "series(bern[3^-k]^1)" in out

    def test_relation_disjoint(self, specs, tmp_path):
        leb = tmp_path / "leb.json"
        leb.write_text(json.dumps({"atoms": [], "lebesgue": True,
                                   "bernoulli": None, "scale": "1"}))
        code, out, _ = run_cli("class-op", "--op", "relation",
                               "--a", specs["m2"], "--b", str(leb))
        assert code == 0
        assert "relation: Disjoint" in out
        assert "SingularPowers" in out

    def test_convolve(self, specs, tmp_path):
        pair = tmp_path / "pair.json"
        pair.write_text(json.dumps({
            "atoms": [["1", "1/2"], ["-1", "1/2"]], "lebesgue": False,
            "bernoulli": None, "scale": "1"}))
        code, out, _ = run_cli("class-op", "--op", "convolve",
                               "--a", str(pair), "--b", str(pair))
        assert code == 0
        assert "atoms{-2,0,2}" in out

    def test_relation_unknown_exit(self, specs):
        code, out, _ = run_cli("class-op", "--op", "relation",
                               "--a", specs["fact"], "--b", specs["m2"])
        assert code == 2
        assert "relation: Unknown" in out


class TestDistinguish:
    def test_certificate_file(self, specs, tmp_path):
        cert_path = tmp_path / "cert.txt"
        code, out, _ = run_cli(
            "distinguish", "--a", specs["m1"], "--b", specs["m2"],
            "--label-a", "M1", "--label-b", "M2", "--out", str(cert_path))
        assert code == 0
        assert "verdict: NotIsomorphic" in out
        assert "replay: ok" in out
        text = cert_path.read_text()
        assert text.startswith("CERTIFICATE-V1")
        assert "SingularPowers" in text and "R-CORE" in text

    def test_determinism(self, specs, tmp_path):
        outs = []
        for i in (1, 2):
            p = tmp_path / f"cert{i}.txt"
            run_cli("distinguish", "--a", specs["m1"], "--b", specs["m2"],
                    "--out", str(p))
            outs.append(p.read_bytes())
        assert outs[0] == outs[1]

    def test_axiom_override_changes_hash_and_verdict(self, specs, tmp_path):
        table = tmp_path / "axioms.txt"
        table.write_text(
            "AtomsVsLebesgue | countable sets are null | standard\n")
        p = tmp_path / "cert.txt"
        code, out, _ = run_cli(
            "distinguish", "--a", specs["m1"], "--b", specs["m2"],
            "--axioms", str(table), "--out", str(p))
        assert code == 2
        assert "verdict: Undetermined" in out
        default_code, default_out, _ = run_cli(
            "distinguish", "--a", specs["m1"], "--b", specs["m2"])
        line = [ln for ln in default_out.splitlines()
                if ln.startswith("axiom-table:")][0]
        line2 = [ln for ln in out.splitlines()
                 if ln.startswith("axiom-table:")][0]
        assert line != line2


class TestOracleCheck:
    def test_small_run(self, tmp_path):
        report = tmp_path / "report.txt"
        code, out, _ = run_cli("oracle-check", "--cases", "30",
                               "--seed", "9", "--out", str(report))
        assert code == 0
        assert "failures: 0" in out
        assert report.read_text() == out


class TestReportHeader:
    def test_flags_echoed(self, specs):
        _, out, _ = run_cli("classify", "--measure", specs["m2"])
        assert "command: classify" in out
        assert f"flags: measure={specs['m2']}" in out
        assert "precision: " in out

    def test_lambda_flag_echoed(self, specs):
        _, out, _ = run_cli("converge", "--measure", specs["fact"],
                            "--family", "factorial", "--lambda", "2/3",
                            "--n", "3..4")
        header = [ln for ln in out.splitlines()
                  if ln.startswith("flags:")][0]
        assert "lambda=2/3" in header

    def test_classify_witness_lines(self, specs):
        code, out, _ = run_cli("classify", "--measure", specs["fact"])
        assert code == 0
        assert "completion: NonLocallyCompact" in out
        assert "witness-per-n:" in out
