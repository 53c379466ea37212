import subprocess
import sys

import pytest

from momentforge import example_path
from momentforge.cli import main

CHSH = str(example_path("chsh.ncpop"))
I3322 = str(example_path("i3322.ncpop"))


def run(capsys, *args):
    code = main(list(args))
    out, err = capsys.readouterr()
    return code, out, err


def test_info_chsh(capsys):
    code, out, _ = run(capsys, "info", CHSH)
    assert code == 0
    assert "ambient group order: 128" in out
    assert "symmetry group order: 16" in out
    assert "level 1: basis 5, variables 10 (none) / 1 (full)" in out


def test_info_i3322_level3(capsys):
    code, out, _ = run(capsys, "info", I3322, "--level", "3")
    assert code == 0
    assert "symmetry group order: 8" in out
    assert "level 3: basis 88, variables 867 (none) / 124 (full), split blocks 44+44" in out


def test_export_both(capsys, tmp_path):
    code, out, _ = run(capsys, "export", CHSH, "--format", "both", "--out", str(tmp_path / "chsh"))
    assert code == 0
    sdpa = (tmp_path / "chsh.dat-s").read_text().splitlines()
    data = [ln for ln in sdpa if not ln.startswith('"')]
    assert data[:3] == ["1", "1", "5"]
    assert (tmp_path / "chsh.relax").exists()
    assert "variables: 1" in out


def test_export_split_header(capsys, tmp_path):
    code, _, _ = run(capsys, "export", I3322, "--sym", "split", "--out", str(tmp_path / "i"))
    assert code == 0
    data = [ln for ln in (tmp_path / "i.dat-s").read_text().splitlines() if not ln.startswith('"')]
    assert data[:3] == ["124", "2", "44 44"]


def test_export_bad_directory(capsys, tmp_path):
    code, _, err = run(capsys, "export", CHSH, "--out", str(tmp_path / "missing" / "x"))
    assert code == 2 and "does not exist" in err


def test_solve_chsh(capsys):
    code, out, err = run(capsys, "solve", CHSH)
    assert code == 0
    assert "objective: 2.82842712" in out
    assert "status: optimal" in out
    assert "solve:" in err and "solve:" not in out


def test_solve_not_optimal(capsys):
    code, out, _ = run(capsys, "solve", CHSH, "--max-iter", "1")
    assert code == 1 and "status: max_iter" in out


def test_parse_error_exit(capsys, tmp_path):
    bad = tmp_path / "bad.ncpop"
    bad.write_text("letters A[0..1] hermitian\nrule A[0]*A[1]*A[0] -> 1\nmaximize A[0]\n")
    code, _, err = run(capsys, "info", str(bad))
    assert code == 3
    assert ":2:6: error: left-hand side must have degree two" in err


def test_usage_errors(capsys, tmp_path):
    assert run(capsys, "info", str(tmp_path / "nope.ncpop"))[0] == 2
    with pytest.raises(SystemExit) as info:
        main(["solve", CHSH, "--level", "0"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["frob"])
    assert info.value.code == 2
    code, _, err = run(capsys, "build", CHSH, "--sym", "split")
    assert code == 2 and "split" in err
    code, _, err = run(capsys, "build", CHSH, "--cap-group", "10")
    assert code == 2 and "cap" in err


def test_threads_env(capsys, monkeypatch):
    monkeypatch.setenv("MOMENTFORGE_THREADS", "1")
    assert run(capsys, "build", CHSH)[0] == 0
    monkeypatch.setenv("MOMENTFORGE_THREADS", "many")
    assert run(capsys, "build", CHSH)[0] == 2


def test_stdout_is_deterministic():
    cmd = [sys.executable, "-m", "momentforge.cli", "solve", CHSH, "--sym", "none"]
    a = subprocess.run(cmd, capture_output=True, text=True, check=True)
    b = subprocess.run(cmd, capture_output=True, text=True, check=True)
    assert a.stdout == b.stdout
