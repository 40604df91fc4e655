"""CLI dispatch: JSON schema, exit codes, spec'd behaviors end to end."""

import json

import pytest

from vfield.cli import run_subcommand

LV_TEXT = """
vars X, Y
params a = 1, b, c = 1, d
X' = X*(a*Y + b)
Y' = Y*(c*X + d)
"""


@pytest.fixture()
def lv_file(tmp_path):
    path = tmp_path / "lv.txt"
    path.write_text(LV_TEXT, encoding="utf-8")
    return str(path)


def run_json(capsys, argv):
    code = run_subcommand(argv)
    out = capsys.readouterr().out
    assert code == 0, out
    assert out.endswith("\n")
    return json.loads(out)


class TestDarboux:
    def test_specialized_2_3(self, capsys, lv_file):
        payload = run_json(
            capsys,
            [
                "darboux",
                "--system",
                lv_file,
                "--max-degree",
                "3",
                "--set",
                "b=2",
                "--set",
                "d=3",
            ],
        )
        assert payload["command"] == "darboux"
        polys = [c["polynomial"] for c in payload["result"]["curves"]]
        assert polys == ["X", "Y"]
        cofs = [c["cofactor"] for c in payload["result"]["curves"]]
        assert cofs == ["Y + 2", "X + 3"]
        assert payload["result"]["completeness"] == "COMPLETE_UP_TO_BOUND"

    def test_equal_rates_third_curve(self, capsys, lv_file):
        payload = run_json(
            capsys,
            ["darboux", "--system", lv_file, "--set", "b=2", "--set", "d=2"],
        )
        polys = [c["polynomial"] for c in payload["result"]["curves"]]
        assert "X - Y" in polys

    def test_input_echoed(self, capsys, lv_file):
        payload = run_json(
            capsys,
            ["darboux", "--system", lv_file, "--set", "b=2", "--set", "d=3"],
        )
        assert payload["input"]["set"] == {"b": "2", "d": "3"}
        assert payload["input"]["max_degree"] == 4

    def test_deterministic(self, capsys, lv_file):
        argv = ["darboux", "--system", lv_file, "--set", "b=2", "--set", "d=3"]
        first = run_subcommand(argv)
        out1 = capsys.readouterr().out
        second = run_subcommand(argv)
        out2 = capsys.readouterr().out
        assert first == second == 0
        assert out1 == out2


class TestMinimality:
    def test_criterion_fails_at_equal_rates(self, capsys, lv_file):
        payload = run_json(
            capsys,
            ["minimality", "--system", lv_file, "--set", "b=2", "--set", "d=2"],
        )
        assert payload["result"]["verdict"] == "CRITERION_FAILS"

    def test_certified_at_2_3(self, capsys, lv_file):
        payload = run_json(
            capsys,
            ["minimality", "--system", lv_file, "--set", "b=2", "--set", "d=3"],
        )
        assert payload["result"]["verdict"] == "STRONGLY_MINIMAL_CERTIFIED"
        assert payload["result"]["witness"] == "(-3, -2)"
        assert payload["caveats"]


class TestLvOrtho:
    def test_swapped(self, capsys):
        payload = run_json(
            capsys,
            ["lv-ortho", "--b1", "2", "--d1", "3", "--b2", "3", "--d2", "2"],
        )
        cases = [s["case"] for s in payload["result"]["solutions"]]
        assert cases == ["SWAPPED"]
        sol = payload["result"]["solutions"][0]
        assert sol["e"] == "-1"
        assert sol["f"] == "0"

    def test_direct(self, capsys):
        payload = run_json(
            capsys,
            ["lv-ortho", "--b1", "2", "--d1", "3", "--b2", "2", "--d2", "3"],
        )
        cases = [s["case"] for s in payload["result"]["solutions"]]
        assert cases == ["DIRECT"]

    def test_no_matching(self, capsys):
        payload = run_json(
            capsys,
            ["lv-ortho", "--b1", "2", "--d1", "3", "--b2", "4", "--d2", "5"],
        )
        assert payload["result"]["solutions"] == []

    def test_symbolic_rates(self, capsys):
        payload = run_json(
            capsys,
            ["lv-ortho", "--b1", "b", "--d1", "d", "--b2", "b", "--d2", "d"],
        )
        cases = [s["case"] for s in payload["result"]["solutions"]]
        assert cases == ["DIRECT"]

    def test_degenerate_is_domain_error(self, capsys):
        code = run_subcommand(
            ["lv-ortho", "--b1", "2", "--d1", "2", "--b2", "3", "--d2", "4"]
        )
        assert code == 1
        assert "error:" in capsys.readouterr().err


class TestLvAnalyze:
    def test_distinct_rates(self, capsys):
        payload = run_json(capsys, ["lv-analyze", "--b", "2", "--d", "3"])
        result = payload["result"]
        assert result["case"] == "distinct rates"
        assert result["omega1_invariant"] is True
        assert result["recovery_x"] == "3*Z - Z'"

    def test_equal_rates(self, capsys):
        payload = run_json(capsys, ["lv-analyze", "--b", "2", "--d", "2"])
        result = payload["result"]
        assert result["case"] == "equal rates"
        assert result["invariant_curve"] == "X - Y - z"
        assert result["cofactor"] == "2"

    def test_symbolic(self, capsys):
        payload = run_json(capsys, ["lv-analyze", "--b", "b", "--d", "d"])
        assert payload["result"]["omega1_invariant"] is True

    def test_scale_normalization(self, capsys):
        payload = run_json(
            capsys, ["lv-analyze", "--a", "2", "--b", "3", "--c", "5", "--d", "7"]
        )
        result = payload["result"]
        assert result["normalizing_map"] == {"X": "5*X", "Y": "2*Y"}
        assert result["omega1_invariant"] is True


class TestLie:
    def test_invariant_axis(self, capsys, lv_file):
        payload = run_json(
            capsys,
            ["lie", "--system", lv_file, "--poly", "X", "--set", "b=2", "--set", "d=3"],
        )
        assert payload["result"]["lie_derivative"] == "X*Y + 2*X"

    def test_nonpolynomial_rejected(self, capsys, lv_file):
        code = run_subcommand(["lie", "--system", lv_file, "--poly", "1/X"])
        assert code == 1


class TestSingular:
    def test_rational_points(self, capsys, lv_file):
        payload = run_json(
            capsys,
            ["singular", "--system", lv_file, "--set", "b=2", "--set", "d=3"],
        )
        assert payload["result"]["points"] == ["(0, 0)", "(-3, -2)"]
        assert payload["result"]["complete"] is True
        assert payload["caveats"] == []


class TestFormsCheck:
    def test_log_first_integral(self, capsys, lv_file):
        # d(Y - X) + b*dY/Y - d*dX/X is closed and invariant for LV_{1,b,1,d}.
        payload = run_json(
            capsys,
            [
                "forms-check",
                "--system",
                lv_file,
                "--set",
                "b=2",
                "--set",
                "d=3",
                "--exact",
                "Y - X",
                "--dlog",
                "2:Y",
                "--dlog=-3:X",
            ],
        )
        assert payload["result"]["closed"] is True
        assert payload["result"]["invariant"] is True
        assert payload["result"]["lie_derivative"] == "0"

    def test_non_invariant_detected(self, capsys, lv_file):
        payload = run_json(
            capsys,
            [
                "forms-check",
                "--system",
                lv_file,
                "--set",
                "b=2",
                "--set",
                "d=3",
                "--exact",
                "X",
            ],
        )
        assert payload["result"]["closed"] is True
        assert payload["result"]["invariant"] is False

    def test_requires_some_term(self, capsys, lv_file):
        code = run_subcommand(["forms-check", "--system", lv_file])
        assert code == 1

    def test_symbolic_coefficients_stay_invariant(self, capsys, lv_file):
        # The log first integral works with the rates left symbolic.
        payload = run_json(
            capsys,
            [
                "forms-check",
                "--system",
                lv_file,
                "--exact",
                "Y - X",
                "--dlog",
                "b:Y",
                "--dlog=-d:X",
            ],
        )
        assert payload["result"]["invariant"] is True
        assert payload["result"]["closed"] is True

    def test_dlog_flag_shape(self, capsys, lv_file):
        code = run_subcommand(
            ["forms-check", "--system", lv_file, "--dlog", "no-colon"]
        )
        assert code == 1


class TestSimulate:
    def test_json_payload(self, capsys, lv_file):
        payload = run_json(
            capsys,
            [
                "simulate",
                "--system",
                lv_file,
                "--set",
                "b=-2",
                "--set",
                "d=-3",
                "--start",
                "1,1",
                "--t-end",
                "1.0",
                "--step",
                "0.001",
            ],
        )
        assert payload["result"]["samples"] == 1001
        assert payload["result"]["final_time"] == pytest.approx(1.0)
        assert payload["result"]["stop_reason"] is None
        x, y = payload["result"]["final_state"]
        assert 0.0 < x and 0.0 < y

    def test_csv_rows(self, capsys, lv_file):
        code = run_subcommand(
            [
                "simulate",
                "--system",
                lv_file,
                "--set",
                "b=-2",
                "--set",
                "d=-3",
                "--start",
                "1,1",
                "--t-end",
                "0.01",
                "--step",
                "0.005",
                "--csv",
            ]
        )
        out = capsys.readouterr().out
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "t,X,Y"
        assert len(lines) == 4
        first = lines[1].split(",")
        assert float(first[0]) == 0.0
        assert float(first[1]) == 1.0

    def test_truncation_reported_as_caveat(self, capsys, lv_file):
        payload = run_json(
            capsys,
            [
                "simulate",
                "--system",
                lv_file,
                "--set",
                "b=2",
                "--set",
                "d=3",
                "--start",
                "1,1",
                "--t-end",
                "1.0",
                "--step",
                "0.001",
            ],
        )
        assert payload["result"]["stop_reason"] is not None
        assert payload["caveats"] == [payload["result"]["stop_reason"]]

    def test_symbolic_parameter_is_domain_error(self, capsys, lv_file):
        code = run_subcommand(
            [
                "simulate",
                "--system",
                lv_file,
                "--start",
                "1,1",
                "--t-end",
                "0.1",
            ]
        )
        assert code == 1

    def test_bad_start_shape(self, capsys, lv_file):
        code = run_subcommand(
            [
                "simulate",
                "--system",
                lv_file,
                "--set",
                "b=2",
                "--set",
                "d=3",
                "--start",
                "1",
                "--t-end",
                "0.1",
            ]
        )
        assert code == 1


class TestExitCodes:
    def test_missing_file_is_usage_error(self, capsys):
        code = run_subcommand(
            ["darboux", "--system", "/nonexistent/lv.txt"]
        )
        assert code == 2
        assert "error:" in capsys.readouterr().err

    def test_unknown_subcommand(self, capsys):
        assert run_subcommand(["frobnicate"]) == 2

    def test_missing_required_flag(self, capsys):
        assert run_subcommand(["lv-ortho", "--b1", "2"]) == 2

    def test_bad_set_syntax(self, capsys, lv_file):
        code = run_subcommand(["darboux", "--system", lv_file, "--set", "b"])
        assert code == 1

    def test_bad_set_value(self, capsys, lv_file):
        code = run_subcommand(["darboux", "--system", lv_file, "--set", "b=pi"])
        assert code == 1

    def test_syntax_error_in_system(self, capsys, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("vars x; x' = (", encoding="utf-8")
        code = run_subcommand(["singular", "--system", str(path)])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_help_exits_zero(self, capsys):
        assert run_subcommand(["--help"]) == 0
        assert "subcommand" not in capsys.readouterr().err
