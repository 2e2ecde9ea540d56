from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gen import instances
from pstree.core import path
from pstree.errors import ParseError
from pstree.fixtures import all_fixtures, fig2_sight, fig2_tree
from pstree.formula import Announce, Geq, Sg, Univ
from pstree.sight import full_sight
from pstree.textio import parse_formula, parse_pst, parse_pst_bytes, serialize_pst
from test_logic import formulas

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

FIG2_DOC = """\
# fig2
h . 1
h L 1
h R 2
h L.L 3
h L.R 1
h R.L 2
s . -> ., L
s L -> L, L.R
s R -> R, R.L
"""


def test_fig2_document():
    t, s = parse_pst(FIG2_DOC)
    assert t == fig2_tree() and s == fig2_sight()


def test_single_line():
    t, s = parse_pst("h . 0\n")
    assert len(t) == 1 and s == full_sight(t)


def test_missing_prefix_is_positioned():
    with pytest.raises(ParseError) as e:
        parse_pst("h .L 1\n")
    assert e.value.line == 1 and "prefix" in e.value.message


@pytest.mark.parametrize("text, line", [
    ("h . 0\nh . 1\n", 2),
    ("h . 0\nh L 1/0\n", 2),
    ("h . x\n", 1),
    ("h . 0\nq L 1\n", 2),
    ("h . 0\ns . L\n", 2),
    ("h . 0\nh L 1\ns . -> L..R\n", 3),
])
def test_syntax_errors(text, line):
    with pytest.raises(ParseError) as e:
        parse_pst(text)
    assert e.value.line == line and e.value.column >= 1


def test_rationals_and_comments():
    t, _ = parse_pst("# c\n\nh . -3/4\nh a 10/4\n")
    assert t.payoff[()] == Fraction(-3, 4) and t.payoff[("a",)] == Fraction(5, 2)


def test_invalid_sight_needs_repair():
    text = (FIXTURES / "fig1-case1-raw.pst").read_text()
    with pytest.raises(ParseError) as e:
        parse_pst(text)
    assert "--repair" in e.value.message
    for case in ("case1", "case2"):
        text = (FIXTURES / f"fig1-{case}-raw.pst").read_text()
        assert parse_pst(text, repair=True)[1] == all_fixtures()[f"fig1-{case}"][1]


def test_trailing_comment_is_rejected():
    with pytest.raises(ParseError):
        parse_pst("h . 0 # no\n")


def test_formula_examples():
    assert parse_formula("[ann sg(.)] geq(L,R)") == Announce(Sg(()), Geq(("L",), ("R",)))
    f = parse_formula("A (at(L.L) -> at(L))")
    assert isinstance(f, Univ)
    with pytest.raises(ParseError) as e:
        parse_formula("geq(L)")
    assert e.value.line == 1 and e.value.column >= 1
    with pytest.raises(ParseError):
        parse_formula("at(Q)", fig2_tree())


def test_modal_syntax():
    for text in ("[view] [BIv] end", "<leq> p", "[sigma s1] endv", "[bi*] (end & p)", "<SCBI> ~p"):
        assert parse_formula(str(parse_formula(text))) == parse_formula(text)
    with pytest.raises(ParseError):
        parse_formula("[nope] p")


def test_fixture_files_round_trip():
    for name, (t, s) in all_fixtures().items():
        text = (FIXTURES / f"{name}.pst").read_text()
        t2, s2 = parse_pst(text)
        assert (t2, s2) == (t, s)
        assert parse_pst(serialize_pst(t2, s2)) == (t, s)
        assert serialize_pst(*parse_pst(serialize_pst(t, s))) == serialize_pst(t, s)


@given(instances())
def test_round_trip(inst):
    t, s = inst
    assert parse_pst(serialize_pst(t, s)) == (t, s)


@settings(max_examples=200)
@given(instances(max_depth=2), st.data())
def test_formula_print_parse(inst, data):
    t, _ = inst
    f = data.draw(formulas(list(t.histories), 3))
    assert parse_formula(str(f), t) == f


@settings(max_examples=500)
@given(st.binary(max_size=200))
def test_bytes_never_crash(data):
    try:
        parse_pst_bytes(data)
    except ParseError as e:
        assert e.line >= 1 and e.column >= 1


@settings(max_examples=500)
@given(st.text(alphabet="hs.LR01/-> ,#\n\t", max_size=80))
def test_near_miss_text_never_crashes(text):
    try:
        parse_pst(text)
    except ParseError as e:
        assert e.line >= 1 and e.column >= 1


@settings(max_examples=500)
@given(st.text(alphabet="[]<>()~&|-A atgeqsgnd.LR,vi*BIS", max_size=40))
def test_formula_parser_never_crashes(text):
    try:
        parse_formula(text)
    except ParseError as e:
        assert e.column >= 1
