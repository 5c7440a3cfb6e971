"""Command-line contract: outputs, exit codes, determinism, round trips."""

import json

import numpy as np
import pytest

from gegenexp.cli import main
from gegenexp.expansion import ExpansionParams, coeff_table


def run(argv, capsys=None):
    code = main(argv)
    return code


class TestCoeffs:
    def test_csv_quadratic_kernel(self, tmp_path):
        out = tmp_path / "t.csv"
        code = main(
            [
                "coeffs", "--lambda", "1", "--mu", "1", "--nu", "1",
                "--eps", "0", "--lmax", "2", "--mmax", "2",
                "--format", "csv", "--out", str(out),
            ]
        )
        assert code == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "ell,m,b"
        rows = [line.split(",") for line in lines[1:]]
        parsed = {(int(r[0]), int(r[1])): float(r[2]) for r in rows}
        assert set(parsed) == {(0, 0), (0, 2), (1, 1), (2, 0), (2, 2)}
        assert parsed[(0, 0)] == pytest.approx(0.5, abs=1e-12)
        assert parsed[(1, 1)] == pytest.approx(-0.5, abs=1e-12)
        assert parsed[(2, 2)] == 0.0

    def test_odd_parity_rows(self, tmp_path):
        out = tmp_path / "t.csv"
        main(
            [
                "coeffs", "--lambda", "1", "--mu", "1", "--nu", "1",
                "--eps", "1", "--lmax", "2", "--mmax", "2",
                "--format", "csv", "--out", str(out),
            ]
        )
        keys = [
            tuple(map(int, line.split(",")[:2]))
            for line in out.read_text().splitlines()[1:]
        ]
        assert all((ell + m) % 2 == 1 for ell, m in keys)

    def test_json_round_trip_is_bit_exact(self, tmp_path):
        out = tmp_path / "t.json"
        main(
            [
                "coeffs", "--lambda", "1.7", "--mu", "0.9", "--nu", "2.3",
                "--eps", "0", "--lmax", "5", "--mmax", "4",
                "--format", "json", "--out", str(out),
            ]
        )
        payload = json.loads(out.read_text(encoding="utf-8"))
        table = coeff_table(ExpansionParams(1.7, 0.9, 2.3, 0), 5, 4)
        got = np.array(payload["values"]).reshape(6, 5)
        assert np.array_equal(got, table.values)
        assert payload["params"]["lambda"] == 1.7

    def test_missing_flag_exits_2(self):
        with pytest.raises(SystemExit) as info:
            main(["coeffs", "--lambda", "1", "--mu", "1", "--nu", "1"])
        assert info.value.code == 2

    def test_domain_error_exits_2(self, tmp_path):
        code = main(
            [
                "coeffs", "--lambda", "-1", "--mu", "1", "--nu", "1",
                "--eps", "0", "--lmax", "2", "--mmax", "2",
                "--out", str(tmp_path / "x.csv"),
            ]
        )
        assert code == 2


class TestEval:
    def test_hypothesis_violation_exits_3(self, tmp_path):
        code = main(
            [
                "eval", "--lambda", "1", "--mu", "1", "--nu", "1",
                "--order", "4", "--grid", "3", "--out", str(tmp_path / "e.csv"),
            ]
        )
        assert code == 3

    def test_force_override_and_columns(self, tmp_path):
        out = tmp_path / "e.csv"
        code = main(
            [
                "eval", "--lambda", "1", "--mu", "1", "--nu", "1",
                "--order", "4", "--grid", "3", "--force", "--out", str(out),
            ]
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "s,t,series,kernel,abs_err"
        assert len(lines) == 1 + 9
        worst = max(float(line.split(",")[4]) for line in lines[1:])
        assert worst < 1e-12

    def test_degenerate_grid(self, tmp_path):
        out = tmp_path / "e.csv"
        main(
            [
                "eval", "--lambda", "1", "--mu", "1", "--nu", "3.5",
                "--order", "10", "--grid", "1", "--out", str(out),
            ]
        )
        lines = out.read_text().splitlines()
        assert len(lines) == 2
        assert lines[1].startswith("-1.0,-1.0,")

    def test_converged_orders_meet_tolerance(self, tmp_path):
        out = tmp_path / "e.csv"
        code = main(
            [
                "eval", "--lambda", "1", "--mu", "1", "--nu", "3.5",
                "--order", "60", "--grid", "21", "--out", str(out),
            ]
        )
        assert code == 0
        worst = max(
            float(line.split(",")[4]) for line in out.read_text().splitlines()[1:]
        )
        assert worst <= 1e-6


class TestBx:
    def test_prints_value(self, capsys):
        code = main(
            ["bx", "--lambda", "0.7", "--mu", "1.3", "--nu", "0.9",
             "--ell", "0", "--m", "0", "--x", "0"]
        )
        assert code == 0
        val = float(capsys.readouterr().out.strip())
        assert val == pytest.approx(1.4810235188333072, rel=1e-13)

    def test_monomial_zero(self, capsys):
        main(
            ["bx", "--lambda", "0.7", "--mu", "1.3", "--nu", "0.9",
             "--ell", "0", "--m", "2", "--x", "0"]
        )
        assert float(capsys.readouterr().out.strip()) == 0.0

    def test_oracle_flag(self, capsys):
        code = main(
            ["bx", "--lambda", "1", "--mu", "1", "--nu", "1.2",
             "--ell", "1", "--m", "2", "--x", "0.6", "--oracle"]
        )
        assert code == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[1].startswith("oracle ")
        assert float(lines[2].split()[1]) <= 1e-7


class TestVerify:
    def test_single_suite_report(self, capsys):
        code = main(["verify", "--suite", "mehta", "--cases", "1", "--no-timing"])
        out = capsys.readouterr().out
        report = json.loads(out)
        assert code == 0
        assert report["overall_pass"] is True
        assert report["suite"] == "mehta"
        assert report["cases"][0]["identity"] == "gaussian-pair-kernel"
        assert report["cases"][0]["abs_err"] <= 1e-8

    def test_byte_identical_reports(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for path in (a, b):
            main(
                ["verify", "--suite", "stz", "--cases", "2", "--seed", "7",
                 "--no-timing", "--out", str(path)]
            )
        assert a.read_bytes() == b.read_bytes()

    def test_failing_tolerance_exits_1(self, tmp_path):
        code = main(
            ["verify", "--suite", "mehta", "--cases", "1", "--tol", "1e-30",
             "--out", str(tmp_path / "r.json")]
        )
        assert code == 1

    def test_thread_cap_does_not_change_report(self, tmp_path, monkeypatch):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        main(["verify", "--suite", "stz", "--cases", "3", "--no-timing",
              "--out", str(a)])
        monkeypatch.setenv("GEGEN_THREADS", "4")
        main(["verify", "--suite", "stz", "--cases", "3", "--no-timing",
              "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()


class TestExitCodes:
    def test_oracle_nonconvergence_exits_4(self, monkeypatch, capsys):
        from gegenexp import verify as vf
        from gegenexp.oracle import OracleConvergenceError

        def boom(*args, **kwargs):
            def run():
                raise OracleConvergenceError("stalled", value=0.0, est_error=1.0)

            return run

        monkeypatch.setattr(vf, "_u_scaled_spec", boom)
        code = main(
            ["bx", "--lambda", "1", "--mu", "1", "--nu", "1.2",
             "--ell", "1", "--m", "2", "--x", "0.6", "--oracle"]
        )
        assert code == 4


class TestCsvRoundTrip:
    def test_values_round_trip_bit_exact(self, tmp_path):
        out = tmp_path / "t.csv"
        main(
            [
                "coeffs", "--lambda", "1.7", "--mu", "0.9", "--nu", "2.3",
                "--eps", "1", "--lmax", "6", "--mmax", "6",
                "--format", "csv", "--out", str(out),
            ]
        )
        table = coeff_table(ExpansionParams(1.7, 0.9, 2.3, 1), 6, 6)
        for line in out.read_text(encoding="utf-8").splitlines()[1:]:
            ell, m, b = line.split(",")
            assert float(b) == table.values[int(ell), int(m)]
