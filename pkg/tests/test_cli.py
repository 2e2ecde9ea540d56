from pathlib import Path

import pytest

from pstree.cli import main
from pstree.textio import load_pst

FIX = Path(__file__).resolve().parent.parent / "fixtures"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_solve(capsys):
    assert run(capsys, "solve", FIX / "fig2.pst") == (0, "BI: {L.L}  SCBI: {L.R}\n", "")


def test_mc(capsys):
    code, out, _ = run(capsys, "mc", FIX / "fig3.pst", "--formula", "[ann sg(.)] geq(L,R)", "--at", ".")
    assert (code, out) == (0, "true\n")
    code, out, _ = run(capsys, "mc", FIX / "fig3.pst", "--formula", "geq(L,R)", "--valid")
    assert code == 1 and out.startswith("false")
    code, out, _ = run(capsys, "mc", FIX / "fig2.pst", "--formula", "<BI> p", "--prop", "p=L.L", "--at", ".")
    assert (code, out) == (0, "true\n")


def test_validate(capsys, tmp_path):
    bad = tmp_path / "bad.pst"
    bad.write_text("h . 0\nh L x\n")
    code, out, err = run(capsys, "validate", bad)
    assert code == 2 and out == "" and ":2:" in err
    assert run(capsys, "validate", FIX / "fig1-case1-raw.pst")[0] == 2
    code, out, _ = run(capsys, "validate", FIX / "fig1-case1-raw.pst", "--repair", "--emit")
    assert code == 0 and "s . -> ., L, R, L.R, R.L" in out


def test_visible(capsys):
    code, out, _ = run(capsys, "visible", FIX / "fig3.pst", "--at", ".")
    assert code == 0 and "P_h(L) = 3" in out and "P_h(R) = 2" in out
    assert run(capsys, "visible", FIX / "fig3.pst", "--at", "Q")[0] == 2


def test_check(capsys):
    code, out, _ = run(capsys, "check", FIX / "fig2.pst")
    assert code == 1 and "equal: false" in out and "consistent: true" in out
    code, out, _ = run(capsys, "check", FIX / "fig3.pst")
    assert code == 0 and "consistent: false (., L, R)" in out


def test_suites(capsys):
    code, out, _ = run(capsys, "axioms", FIX / "fig3.pst", "--max-instances", "30")
    assert code == 0 and "!Sight-Preference" in out
    code, out, _ = run(capsys, "frames", FIX / "fig2.pst", "--valuations", "5")
    assert code == 0 and "BIv-idempotent" in out


def test_gen_hunt_sweep(capsys, tmp_path):
    out_file = tmp_path / "g.pst"
    assert run(capsys, "gen", "--depth", "3", "--branch", "2", "--sight", "horizon:1", "--seed", "5", "--out", out_file)[0] == 0
    load_pst(out_file)
    code, out, _ = run(capsys, "hunt", "--target", "fact6-c", "--trials", "10")
    assert code == 0 and out.startswith("trial:")
    assert run(capsys, "hunt", "--target", "schema:T_s", "--trials", "5")[0] == 1
    assert run(capsys, "hunt", "--target", "bogus")[0] == 2
    csv = tmp_path / "s.csv"
    assert run(capsys, "sweep", "--horizons", "0..2", "--trials", "3", "--out", csv)[0] == 0
    assert len(csv.read_text().splitlines()) == 1 + 3 * 3
    assert run(capsys, "sweep", "--horizons", "3..1")[0] == 2


def test_usage_errors(capsys):
    assert run(capsys, )[0] == 2
    assert run(capsys, "solve", FIX / "missing.pst")[0] == 2
    assert run(capsys, "mc", FIX / "fig2.pst", "--formula", "at(L)")[0] == 2
