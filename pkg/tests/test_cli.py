"""Command-line interface: schemas, exit codes, determinism."""

import json
import math

import pytest

from vallee_lab.cli import main, parse_beta, parse_s, parse_p_rule, CliError


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestParsers:
    def test_beta_plain(self):
        assert parse_beta("0.75") == 0.75
        assert parse_beta("-2") == -2.0

    def test_beta_pi_forms(self):
        assert parse_beta("pi") == pytest.approx(math.pi)
        assert parse_beta("pi/2") == pytest.approx(math.pi / 2)
        assert parse_beta("-3pi/4") == pytest.approx(-3 * math.pi / 4)
        assert parse_beta("2pi") == pytest.approx(2 * math.pi)

    def test_beta_garbage(self):
        with pytest.raises(CliError):
            parse_beta("two pies")

    def test_s_values(self):
        assert parse_s("inf") == float("inf")
        assert parse_s("2") == 2.0
        with pytest.raises(CliError):
            parse_s("0.5")

    def test_p_rules(self):
        assert parse_p_rule("half") == "half"
        assert parse_p_rule("full") == "full"
        assert parse_p_rule("3") == ("fixed", 3)
        with pytest.raises(CliError):
            parse_p_rule("most")


class TestConstantsCommand:
    def test_sup_value(self, capsys):
        code, out, _ = run_cli(capsys, "constants", "--q", "0.5", "--p", "1", "--u", "inf")
        assert code == 0
        data = json.loads(out)
        assert data["schema"] == "vallee-lab/1"
        assert data["rows"][0]["K"] == pytest.approx(2.0, abs=1e-10)

    def test_l2_value_and_residual(self, capsys):
        code, out, _ = run_cli(capsys, "constants", "--q", "0.5", "--u", "2")
        data = json.loads(out)
        row = data["rows"][0]
        assert row["K"] == pytest.approx(math.sqrt(math.pi / 0.75), rel=1e-8)
        assert row["hypergeom_residual"] < 1e-8

    def test_rejects_q_zero(self, capsys):
        code, out, err = run_cli(capsys, "constants", "--q", "0", "--u", "2")
        assert code == 2
        assert json.loads(err)["error"]["exit_code"] == 2

    def test_csv_format(self, capsys):
        code, out, _ = run_cli(capsys, "constants", "--q", "0.5", "--u", "1,inf",
                               "--format", "csv")
        lines = out.strip().splitlines()
        assert lines[0] == "u,K,est_error,sigma,delta,hypergeom_residual"
        assert len(lines) == 3


class TestBestApproxCommand:
    def test_single_harmonic(self, capsys):
        code, out, _ = run_cli(capsys, "best-approx", "--m", "1", "--s", "2",
                               "--cos", "1")
        data = json.loads(out)
        assert code == 0
        assert data["value"] == pytest.approx(math.sqrt(math.pi), rel=1e-10)
        assert data["solver"] == "parseval"

    def test_coeffs_file(self, capsys, tmp_path):
        path = tmp_path / "f.json"
        path.write_text(json.dumps({"a0": 0.0, "a": [0.0, 1.0], "b": [0.0, 0.0]}))
        code, out, _ = run_cli(capsys, "best-approx", "--m", "2", "--s", "inf",
                               "--coeffs", str(path))
        data = json.loads(out)
        assert data["value"] == pytest.approx(1.0, abs=1e-9)

    def test_missing_function(self, capsys):
        code, _, err = run_cli(capsys, "best-approx", "--m", "2", "--s", "2")
        assert code == 2


class TestVerifyCommand:
    def test_single_harmonic_ratio(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--theorem", "T1", "--psi", "geometric",
                               "--q", "0.5", "--s", "2", "--n", "9", "--p", "1")
        data = json.loads(out)
        assert code == 0
        assert data["report"]["ratio"] == pytest.approx(math.sqrt(0.75), abs=1e-6)

    def test_low_degree_coeffs_ratio_zero(self, capsys, tmp_path):
        path = tmp_path / "phi.json"
        path.write_text(json.dumps({"a0": 0.0, "a": [1.0], "b": [0.5]}))
        code, out, _ = run_cli(capsys, "verify", "--theorem", "T1", "--psi", "geometric",
                               "--q", "0.5", "--s", "2", "--n", "8", "--p", "2",
                               "--phi", f"coeffs:{path}")
        data = json.loads(out)
        assert data["report"]["ratio"] < 1e-12

    def test_t4_requires_entire_range_kind(self, capsys):
        code, _, err = run_cli(capsys, "verify", "--theorem", "T4", "--psi", "geometric",
                               "--q", "0.5", "--n", "6", "--p", "1")
        assert code == 2
        assert "ratio limit 0" in json.loads(err)["error"]["message"]

    def test_extremal_phi(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--theorem", "T3", "--psi", "genpoisson",
                               "--alpha", "1", "--r", "2", "--s", "2", "--n", "7",
                               "--p", "1", "--phi", "extremal")
        data = json.loads(out)
        assert data["report"]["ratio"] == pytest.approx(1.0, abs=1e-6)


class TestSweepCommand:
    def test_csv_schema_and_determinism(self, capsys, tmp_path):
        args = ["sweep", "--theorem", "T3", "--psi", "genpoisson", "--alpha", "1",
                "--r", "2", "--s", "2", "--n-from", "5", "--n-to", "8",
                "--p", "1", "--format", "csv"]
        code1, out1, _ = run_cli(capsys, *args)
        code2, out2, _ = run_cli(capsys, *args)
        assert code1 == code2 == 0
        assert out1 == out2  # byte identical
        lines = out1.strip().splitlines()
        assert lines[0] == "n,p,lhs,rhs_leading,budget1,budget2,ratio,status"
        assert len(lines) == 5
        assert all(line.endswith(",ok") for line in lines[1:])

    def test_empty_range_exits_2(self, capsys):
        code, _, err = run_cli(capsys, "sweep", "--theorem", "T3", "--psi", "genpoisson",
                               "--alpha", "1", "--r", "2", "--s", "2",
                               "--n-from", "9", "--n-to", "5", "--p", "1")
        assert code == 2

    def test_t2_rejected(self, capsys):
        code, _, err = run_cli(capsys, "sweep", "--theorem", "T2", "--psi", "geometric",
                               "--q", "0.5", "--s", "2", "--n-from", "5", "--n-to", "6",
                               "--p", "1")
        assert code == 2

    def test_out_file_and_json(self, capsys, tmp_path):
        path = tmp_path / "sweep.json"
        code, out, _ = run_cli(capsys, "sweep", "--theorem", "T4", "--psi", "genpoisson",
                               "--alpha", "1", "--r", "2", "--n-from", "5", "--n-to", "6",
                               "--p", "half", "--out", str(path))
        assert code == 0 and out == ""
        data = json.loads(path.read_text())
        assert data["schema"] == "vallee-lab/1"
        assert [row["n"] for row in data["rows"]] == [5, 6]


class TestExitCodes:
    def test_numeric_failure_exits_3(self, capsys):
        code, _, err = run_cli(capsys, "constants", "--q", "0.9995", "--u", "2")
        assert code == 3
        assert json.loads(err)["error"]["exit_code"] == 3

    def test_partial_sweep_exits_4(self, capsys):
        # q beyond the quadrature guard: the sharp constant fails on every row
        code, out, _ = run_cli(capsys, "sweep", "--theorem", "T1", "--psi", "geometric",
                               "--q", "0.9995", "--s", "2", "--n-from", "6",
                               "--n-to", "8", "--p", "1", "--format", "csv")
        assert code == 4
        lines = out.strip().splitlines()
        assert all("error:" in line for line in lines[1:])
