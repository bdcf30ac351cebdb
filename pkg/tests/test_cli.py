import json

import pytest

from src.cli import main


def run(tmp_path, name, *args):
    out = tmp_path / f"{name}.json"
    code = main([*args, "--output", str(out), "--quiet"])
    report = json.loads(out.read_text(encoding="utf-8")) if out.exists() else None
    return code, report, out


def test_solve_jordan_t3(tmp_path):
    code, report, _ = run(tmp_path, "solve", "solve", "--algebra", "tn:3", "--field", "Q",
                          "--mode", "jordan")
    assert code == 0
    assert report["tool"] == "gh-derivation-verifier"
    assert report["seed"] == 0
    assert report["basis_ordering"] == "row-major-ij"
    assert report["packing_layout"] == "fgh-column-major"
    space = report["solution_space"]
    assert space["dim"] == 8
    assert len(space["basis"]) == 8


def test_verify_theorem1(tmp_path):
    code, report, _ = run(tmp_path, "t1", "verify-theorem1", "--n", "3", "--field", "Q")
    assert code == 0
    tr = report["theorem_report"]
    assert tr["equal"] is True
    assert tr["dim_jordan_corner"] == tr["dim_gh"] == 7
    assert tr["dim_jordan"] == 8
    assert tr["jordan_vs_gh"] == "a_strict_superset"
    assert tr["monotone"] is True
    assert "elapsed_seconds" not in tr
    assert report["seed"] == 0
    witness = tr["jordan_vs_gh_witness"]
    assert set(witness) == {"f", "g", "h"}
    assert "witness" not in tr


def test_verify_theorem2_prime_field(tmp_path):
    code, report, _ = run(tmp_path, "t2", "verify-theorem2", "--n", "2", "--field", "Fp:7")
    assert code == 0
    tr = report["theorem_report"]
    assert tr["equal"] is True
    assert tr["dim_jordan"] == tr["dim_gh"] == 5
    assert report["field"] == "Fp:7"


def test_theorem_timings_opt_in(tmp_path):
    code, report, _ = run(tmp_path, "t", "verify-theorem2", "--n", "2", "--timings")
    assert code == 0
    assert report["theorem_report"]["elapsed_seconds"] >= 0


def test_counterexample(tmp_path):
    code, report, _ = run(tmp_path, "cx", "counterexample", "--field", "Q")
    assert code == 0
    assert report["reproduced"] is True
    assert report["jordan_check"]["passed"] is True
    gh = report["gh_check"]
    assert gh["passed"] is False
    assert gh["witness"]["x"] == {"(1,1)": "1"}
    assert gh["witness"]["y"] == {"(1,1)": "1"}
    assert gh["witness"]["defect"] == {"(1,2)": "-1"}


def test_oracle_check(tmp_path):
    code, report, _ = run(tmp_path, "oc", "oracle-check", "--algebra", "tn:2", "--field", "Q",
                          "--trials", "1000", "--seed", "42")
    assert code == 0
    assert report["passed"] is True
    assert report["seed"] == 42
    for mode in ("gh", "jordan", "jordan-corner"):
        assert report["modes"][mode]["agree"] is True
        assert report["modes"][mode]["oracle_dim"] == report["modes"][mode]["dim"]
    assert report["bilinearity"]["disagreements"] == 0
    assert report["pair_families"]["jordan-corner"]["clean"] is True


def test_reports_are_byte_identical(tmp_path):
    args = ["oracle-check", "--algebra", "tn:2", "--trials", "30", "--seed", "7"]
    _, _, first = run(tmp_path, "a", *args)
    _, _, second = run(tmp_path, "b", *args)
    assert first.read_bytes() == second.read_bytes()

    _, _, first = run(tmp_path, "c", "verify-theorem1", "--n", "2")
    _, _, second = run(tmp_path, "d", "verify-theorem1", "--n", "2")
    assert first.read_bytes() == second.read_bytes()


def test_json_goes_to_stdout_without_output(capsys):
    code = main(["solve", "--algebra", "mn:2", "--mode", "gh", "--quiet"])
    assert code == 0
    captured = capsys.readouterr()
    assert json.loads(captured.out)["solution_space"]["dim"] == 5
    assert captured.err == ""


def test_summary_on_stderr(capsys):
    main(["counterexample"])
    captured = capsys.readouterr()
    assert "✅" in captured.err
    assert json.loads(captured.out)["reproduced"] is True


@pytest.mark.parametrize("argv", [
    ["verify-theorem1", "--n", "1"],
    ["verify-theorem2", "--n", "0"],
    ["solve", "--algebra", "tn:2", "--mode", "gh", "--field", "Fp:2"],
    ["solve", "--algebra", "tn:2", "--mode", "gh", "--field", "Fp:9"],
    ["solve", "--algebra", "xn:2", "--mode", "gh"],
    ["solve", "--algebra", "tn:2", "--mode", "lie"],
    ["oracle-check", "--algebra", "tn:2", "--trials", "0"],
    ["no-such-command"],
])
def test_usage_errors_exit_2(tmp_path, argv):
    out = tmp_path / "never.json"
    assert main([*argv, "--output", str(out), "--quiet"]) == 2
    assert not out.exists()


def test_golden_file_agrees(tmp_path, golden):
    from tests.conftest import GOLDEN_FILE

    code, report, _ = run(tmp_path, "g", "verify-theorem1", "--n", "2", "--golden", GOLDEN_FILE)
    assert code == 0
    assert report["golden"]["ok"] is True
    assert golden["tn:2|Q|jordan"] == 5


def test_golden_drift_exits_1(tmp_path):
    drifted = tmp_path / "golden.json"
    drifted.write_text(json.dumps({"dimensions": {"tn:2|Q|gh": 3}}), encoding="utf-8")
    code, report, _ = run(tmp_path, "g", "solve", "--algebra", "tn:2", "--mode", "gh",
                          "--golden", str(drifted))
    assert code == 1
    assert report["golden"]["drift"] == [{"key": "tn:2|Q|gh", "expected": 3, "computed": 4}]


def test_record_golden_small_grid(tmp_path, capsys):
    out = tmp_path / "golden.json"
    code = main(["record-golden", "--output", str(out), "--tn", "2", "--mn", "2",
                 "--fields", "Q,Fp:7", "--quiet"])
    assert code == 0
    dims = json.loads(out.read_text(encoding="utf-8"))["dimensions"]
    assert len(dims) == 2 * 2 * 5
    assert dims["tn:2|Q|jordan"] == 5
    assert dims["mn:2|Fp:7|gh"] == 5
    assert dims["mn:2|Q|derivation"] == 3
    report = json.loads(capsys.readouterr().out)
    assert report["command"] == "record-golden"
    assert report["written"] is True
    assert report["disagreements"] == []
    assert report["entries"] == 20


@pytest.mark.slow
@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_theorem1_across_sizes(tmp_path, n):
    code, report, _ = run(tmp_path, "t1", "verify-theorem1", "--n", str(n), "--field", "Fp:7")
    assert code == 0
    assert report["theorem_report"]["equal"] is True


@pytest.mark.slow
def test_theorem2_m3(tmp_path):
    code, report, _ = run(tmp_path, "t2", "verify-theorem2", "--n", "3")
    assert code == 0
    assert report["theorem_report"]["dim_gh"] == 10


@pytest.fixture
def gh_assembly_with_extra_row(monkeypatch):
    import src.solver as solver_module
    from src.solver import Mode

    real_assemble = solver_module.assemble

    def assemble(algebra, mode):
        system = real_assemble(algebra, mode)
        if Mode(mode) is Mode.GH:
            system.rows.append({0: algebra.domain.one()})
            system.tags.append(system.tags[0])
        return system

    monkeypatch.setattr(solver_module, "assemble", assemble)


def test_oracle_check_catches_assembly_errors(tmp_path, gh_assembly_with_extra_row):
    code, report, _ = run(tmp_path, "oc", "oracle-check", "--algebra", "tn:2", "--trials", "30")
    assert code == 1
    assert report["passed"] is False
    gh = report["modes"]["gh"]
    assert gh["agree"] is False
    assert (gh["dim"], gh["oracle_dim"]) == (3, 4)
    assert report["modes"]["jordan"]["agree"] is True


def test_record_golden_refuses_on_assembly_errors(tmp_path, capsys, gh_assembly_with_extra_row):
    out = tmp_path / "golden.json"
    code = main(["record-golden", "--output", str(out), "--tn", "2", "--mn", "",
                 "--fields", "Q", "--quiet"])
    assert code == 1
    assert not out.exists()
    report = json.loads(capsys.readouterr().out)
    assert report["written"] is False
    assert report["disagreements"] == [{"key": "tn:2|Q|gh", "solver": 3, "oracle": 4}]
