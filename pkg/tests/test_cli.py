import json
import subprocess
import sys

import pytest

from incdeg.cli import main

from conftest import DATA, EXAMPLE1_FACTS, KAPPA


@pytest.fixture
def files(tmp_path):
    facts = tmp_path / "d.facts"
    rules = tmp_path / "k.dc"
    facts.write_text(EXAMPLE1_FACTS)
    rules.write_text(KAPPA)
    return str(facts), str(rules)


@pytest.fixture
def exo_files(tmp_path):
    facts = tmp_path / "x.facts"
    facts.write_text("*P(a). P(e). *Q(a,b). R(a,c).\n")
    rules = tmp_path / "k.dc"
    rules.write_text(KAPPA)
    return str(facts), str(rules)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_inconsistent(capsys, files):
    code, out, _ = run(capsys, "check", *files)
    assert code == 1
    data = json.loads(out)
    assert data["consistent"] is False and data["violations"] == 2


def test_check_consistent(capsys, tmp_path, files):
    facts = tmp_path / "ok.facts"
    facts.write_text("P(e). Q(a,b).\n")
    code, out, _ = run(capsys, "check", str(facts), files[1], "--format", "text")
    assert code == 0 and out.startswith("consistent")


def test_measure_json(capsys, files):
    code, out, _ = run(capsys, "measure", *files)
    assert code == 0
    data = json.loads(out)
    assert data["measure"] == {"num": 1, "den": 4}
    assert data["decimal"] == "0.25"
    assert data["witnesses"] == [[1]]


def test_measure_text(capsys, files):
    code, out, _ = run(capsys, "measure", *files, "--semantics", "s", "--format", "text")
    assert code == 0
    assert out.splitlines()[0] == "inc-deg[s,g3] = 1/4 (0.25)"
    assert "delete P(a)" in out


def test_measure_irreparable(capsys, exo_files):
    code, out, _ = run(capsys, "measure", *exo_files, "--semantics", "c-endo")
    assert code == 0
    data = json.loads(out)
    assert data["irreparable"] is True and data["measure"] == {"num": 4, "den": 4}


def test_repairs_s(capsys, files):
    code, out, _ = run(capsys, "repairs", *files, "--semantics", "s")
    assert code == 0
    data = json.loads(out)
    assert data["count"] == 2 and not data["truncated"]
    assert [r["deleted"] for r in data["repairs"]] == [[1], [3, 4]]


def test_repairs_text_none(capsys, exo_files):
    code, out, _ = run(capsys, "repairs", *exo_files, "--semantics", "c-endo", "--format", "text")
    assert code == 0 and "no repair" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["measure", "--normalizer", "endo"],
        ["measure", "--witnesses", "-1"],
        ["repairs", "--cap", "0"],
    ],
)
def test_bad_flags_exit_2(capsys, files, argv):
    code, _, err = run(capsys, argv[0], *files, *argv[1:])
    assert code == 2 and err.startswith("incdeg:")


def test_missing_file_exit_2(capsys, files):
    code, _, err = run(capsys, "check", "/nonexistent.facts", files[1])
    assert code == 2 and "nonexistent" in err


def test_parse_error_exit_2(capsys, tmp_path, files):
    bad = tmp_path / "bad.facts"
    bad.write_text("P(a).\nP(a,b).\n")
    code, _, err = run(capsys, "check", str(bad), files[1])
    assert code == 2 and "bad.facts:2:1" in err


def test_emit_asp_stdout_matches_golden(capsys, tmp_path):
    code, out, _ = run(
        capsys, "emit-asp", str(DATA / "example1.facts"), str(DATA / "example1.dc"),
        "--dialect", "dlv",
    )
    assert code == 0 and out == (DATA / "example1.lp").read_text()


def test_emit_asp_out_file(capsys, tmp_path, files):
    target = tmp_path / "p.lp"
    code, out, _ = run(capsys, "emit-asp", *files, "--out", str(target), "--dialect", "dlv")
    assert code == 0
    assert json.loads(out) == {"program": str(target)}
    assert target.read_text().endswith("numdel(X)?\n")


def test_emit_asp_solve_without_solver(capsys, tmp_path, files, monkeypatch):
    monkeypatch.delenv("INCDEG_SOLVER_CMD", raising=False)
    target = tmp_path / "p.lp"
    code, _, err = run(capsys, "emit-asp", *files, "--out", str(target), "--solve")
    assert code == 3 and "INCDEG_SOLVER_CMD" in err
    assert target.exists()


def test_emit_asp_solver_error(capsys, files):
    code, _, _ = run(capsys, "emit-asp", *files, "--solve", "--solver-cmd", "sh -c 'exit 7'")
    assert code == 4


@pytest.mark.solver
def test_emit_asp_solve(capsys, solver, exo_files, files):
    cmd, dialect = solver
    code, out, _ = run(capsys, "emit-asp", *files, "--solve", "--solver-cmd", cmd, "--dialect", dialect)
    assert code == 0
    data = json.loads(out)
    assert data["external_numdel"] == data["internal_min_deletions"] == 1 and data["agree"]
    code, out, _ = run(capsys, "emit-asp", *exo_files, "--solve", "--solver-cmd", cmd, "--dialect", dialect)
    data = json.loads(out)
    assert data["external_numdel"] is None and data["internal_min_deletions"] is None


def test_subprocess_runs_are_byte_identical(files):
    argv = [sys.executable, "-m", "incdeg", "measure", *files, "--semantics", "s", "--witnesses", "5"]
    outs = [subprocess.run(argv, capture_output=True, check=True).stdout for _ in range(2)]
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["witnesses"] == [[1], [3, 4]]
