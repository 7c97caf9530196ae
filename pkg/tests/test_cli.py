import json

import pytest

from qdesk.cli import main
from qdesk.qstate import PureState


def run_cli(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestShorCommand:
    def test_exact_success_probability_in_json(self, capsys):
        code, out, _ = run_cli(
            capsys, ["shor", "--n", "3", "--r", "4", "--discipline", "skip-F", "--seed", "7", "--json"]
        )
        assert code == 0
        report = json.loads(out)
        assert report["success_probability_exact"] == pytest.approx(0.5, abs=1e-12)
        assert report["seed"] == 7
        assert len(report["distribution"]) == 8

    def test_byte_identical_output_for_same_argv(self, capsys):
        argv = ["shor", "--n", "3", "--r", "4", "--seed", "9", "--trials", "50", "--json"]
        _, first, _ = run_cli(capsys, argv)
        _, second, _ = run_cli(capsys, argv)
        assert first == second

    def test_trials_produce_empirical_rate(self, capsys):
        code, out, _ = run_cli(
            capsys, ["shor", "--n", "2", "--r", "2", "--trials", "100", "--seed", "1", "--json"]
        )
        report = json.loads(out)
        assert report["trials"] == 100
        assert 0.0 <= report["success_rate_empirical"] <= 1.0

    def test_modexp_instance(self, capsys):
        code, out, _ = run_cli(
            capsys, ["shor", "--n", "4", "--base", "7", "--modulus", "15", "--json"]
        )
        assert code == 0
        assert json.loads(out)["r"] == 4

    def test_dump_state_writes_loadable_json(self, capsys, tmp_path):
        path = tmp_path / "state.json"
        code, _, _ = run_cli(
            capsys, ["shor", "--n", "2", "--r", "2", "--seed", "3", "--dump-state", str(path)]
        )
        assert code == 0
        state = PureState.from_json(json.loads(path.read_text()))
        assert abs(state.norm() - 1.0) < 1e-10

    def test_records_are_json_lines_with_seed(self, capsys, tmp_path):
        path = tmp_path / "records.jsonl"
        code, _, _ = run_cli(
            capsys,
            [
                "shor", "--n", "2", "--r", "2", "--discipline", "measure-F-at-t2",
                "--trials", "5", "--seed", "2", "--records", str(path),
            ],
        )
        assert code == 0
        lines = [json.loads(line) for line in path.read_text().splitlines()]
        assert len(lines) == 10  # F and X per trial
        for record in lines:
            assert set(record) == {"register", "outcome", "probability", "seed"}
            assert record["seed"] == 2


class TestGroverCommand:
    def test_standard_game_report(self, capsys):
        code, out, _ = run_cli(capsys, ["grover", "--n", "4", "--k", "0", "--variant", "standard", "--json"])
        assert code == 0
        report = json.loads(out)
        assert report["answered_x"] == 0
        assert report["oracle_queries"] == 1
        assert report["hit_probability"] == pytest.approx(1.0, abs=1e-10)

    def test_extended_game_report(self, capsys):
        code, out, _ = run_cli(capsys, ["grover", "--n", "4", "--variant", "extended", "--seed", "5", "--json"])
        report = json.loads(out)
        assert report["announced_k"] == report["answered_x"]
        joint = report["joint_distribution"]
        assert set(joint) == {f"{k},{k}" for k in range(4)}

    def test_dump_state(self, capsys, tmp_path):
        path = tmp_path / "grover.json"
        code, _, _ = run_cli(capsys, ["grover", "--n", "4", "--k", "2", "--dump-state", str(path)])
        assert code == 0
        state = PureState.from_json(json.loads(path.read_text()))
        assert abs(state.norm() - 1.0) < 1e-10


class TestGameCommand:
    def test_worked_example(self, capsys):
        code, out, _ = run_cli(capsys, ["game", "--drawers", "4", "--k", "2", "--strategy", "joint", "--json"])
        report = json.loads(out)
        assert report["announced_row"] == 1
        assert report["oracle_queries"] <= 2
        assert report["found_drawer"] == 2
        assert report["worst_case_queries"] == 2

    def test_unilateral_worst_case(self, capsys):
        code, out, _ = run_cli(
            capsys, ["game", "--drawers", "64", "--k", "17", "--strategy", "unilateral", "--json"]
        )
        assert json.loads(out)["worst_case_queries"] == 64


class TestDeferCheckCommand:
    def test_builtin_program(self, capsys):
        code, out, _ = run_cli(capsys, ["defer-check", "--fig1", "--n", "2", "--r", "2", "--json"])
        assert code == 0
        assert json.loads(out)["tv_distance"] == pytest.approx(0.0, abs=1e-10)

    def test_circuit_file_with_auto_defer(self, capsys, tmp_path):
        from qdesk import build_periodic, period_circuit

        path = tmp_path / "fig1.json"
        program = period_circuit(build_periodic(2, 2), "measure-F-at-t2")
        path.write_text(json.dumps(program.to_json()))
        code, out, _ = run_cli(capsys, ["defer-check", "--circuit", str(path), "--auto-defer", "--json"])
        assert code == 0
        report = json.loads(out)
        assert report["tv_distance"] == pytest.approx(0.0, abs=1e-10)
        assert report["observed"] == ["F", "X"]

    def test_two_files(self, capsys, tmp_path):
        from qdesk import build_periodic, period_circuit

        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        a.write_text(json.dumps(period_circuit(build_periodic(2, 2), "measure-F-at-t2").to_json()))
        b.write_text(json.dumps(period_circuit(build_periodic(2, 4), "measure-F-at-t2").to_json()))
        code, out, _ = run_cli(
            capsys, ["defer-check", "--circuit", str(a), "--against", str(b), "--observed", "X", "--json"]
        )
        assert json.loads(out)["tv_distance"] == pytest.approx(0.5, abs=1e-10)

    def test_missing_file_is_internal_error(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, ["defer-check", "--circuit", str(tmp_path / "nope.json")])
        assert code == 1
        assert "error" in err

    def test_missing_arguments(self, capsys):
        code, _, err = run_cli(capsys, ["defer-check"])
        assert code == 1


class TestCostCommand:
    def test_csv_columns(self, capsys):
        code, out, _ = run_cli(capsys, ["cost", "--n-range", "2:4", "--csv"])
        lines = out.strip().splitlines()
        assert lines[0] == "n,stage,classical_units,quantum_units"
        assert lines[1] == "2,function-evaluation,4,3"
        assert len(lines) == 1 + 9

    def test_json_rows(self, capsys):
        code, out, _ = run_cli(capsys, ["cost", "--n-range", "2:3", "--json"])
        rows = json.loads(out)["rows"]
        assert {r["stage"] for r in rows} == {"function-evaluation", "filtration", "extraction"}

    def test_bad_range(self, capsys):
        code, _, err = run_cli(capsys, ["cost", "--n-range", "ten"])
        assert code == 1


class TestMixtureCheckCommand:
    def test_distances(self, capsys):
        code, out, _ = run_cli(capsys, ["mixture-check", "--samples", "20000", "--seed", "3", "--json"])
        report = json.loads(out)
        assert report["analytic_distance"] < 1e-10
        assert report["monte_carlo_distance"] < 0.05
        assert report["correlated_phase_distance"] > 0.1


class TestCliContract:
    def test_unknown_flag_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["shor", "--frequency", "9"])
        assert exc.value.code == 2

    def test_unknown_subcommand_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["teleport"])
        assert exc.value.code == 2

    def test_env_var_seed_default(self, capsys, monkeypatch):
        monkeypatch.setenv("QDESK_SEED", "123")
        _, out, _ = run_cli(capsys, ["shor", "--n", "2", "--r", "2", "--json"])
        assert json.loads(out)["seed"] == 123

    def test_text_output_is_default(self, capsys):
        code, out, _ = run_cli(capsys, ["game", "--drawers", "4", "--k", "1"])
        assert code == 0
        assert "oracle_queries" in out

    def test_csv_fallback_for_scalar_reports(self, capsys):
        code, out, _ = run_cli(capsys, ["game", "--drawers", "4", "--k", "1", "--csv"])
        assert out.splitlines()[0] == "key,value"

    @pytest.mark.parametrize(
        "command", ["shor", "grover", "game", "defer-check", "cost", "mixture-check"]
    )
    def test_selftest_exits_clean(self, capsys, command):
        code, out, _ = run_cli(capsys, [command, "--selftest"])
        assert code == 0
        assert "FAIL" not in out
