from fractions import Fraction

import pytest
from hypothesis import given

from gen import trees
from pstree.core import Pref, actions_at, fmt, fmt_set, mk_tree, path, prefer, terminals, weakly_prefers
from pstree.errors import DuplicateHistory, MissingPrefix, MissingRoot, UnknownHistory
from pstree.fixtures import fig1_tree, fig3_tree


def test_fig3_entries_build_a_tree():
    t = mk_tree([((), 0), (("L",), 1), (("R",), 2), (("L", "L"), 3), (("R", "L"), 2)])
    assert t == fig3_tree()
    assert t.payoff[("L", "L")] == Fraction(3)


def test_single_node_tree():
    t = mk_tree({(): 0})
    assert terminals(t) == {()}
    assert len(t) == 1 and t.depth == 0


def test_missing_prefix_is_named():
    with pytest.raises(MissingPrefix) as e:
        mk_tree({(): 0, ("L", "L"): 1})
    assert e.value.prefix == ("L",)


def test_duplicates_and_root():
    with pytest.raises(DuplicateHistory):
        mk_tree([((), 0), ((), 1)])
    with pytest.raises(MissingRoot):
        mk_tree({("L",): 0})
    with pytest.raises(MissingRoot):
        mk_tree([])


def test_terminals():
    assert terminals(fig3_tree()) == {("L", "L"), ("R", "L")}
    assert terminals(fig1_tree()) == {path(x) for x in ("L.L", "L.R", "R.L", "R.R")}


def test_actions_at():
    assert actions_at(fig1_tree(), ()) == {"L", "R"}
    assert actions_at(fig3_tree(), ("L", "L")) == frozenset()
    assert actions_at(fig3_tree(), ("R",)) == {"L"}
    with pytest.raises(UnknownHistory):
        actions_at(fig3_tree(), ("Q",))


def test_prefer():
    assert prefer(fig3_tree(), ("R",), ("L",)) is Pref.BETTER
    assert prefer(fig1_tree(), ("R", "R"), ("L", "L")) is Pref.BETTER
    assert prefer(fig1_tree(), ("L", "R"), ("L", "R")) is Pref.SAME
    assert prefer(fig1_tree(), ("L", "R"), ("R", "R")) is Pref.WORSE


def test_formatting():
    assert fmt(()) == "."
    assert fmt(("L", "L")) == "L.L"
    assert path(".") == () and path("L.R") == ("L", "R")
    assert fmt_set([("R",), (), ("L", "L")]) == "{., R, L.L}"


@given(trees())
def test_preference_is_a_total_preorder(t):
    hs = t.histories
    for a in hs:
        assert prefer(t, a, a) is Pref.SAME
        for b in hs:
            assert weakly_prefers(t, a, b) or weakly_prefers(t, b, a)
            for c in hs:
                if weakly_prefers(t, a, b) and weakly_prefers(t, b, c):
                    assert weakly_prefers(t, a, c)


@given(trees())
def test_prefix_closed_and_terminals_nonempty(t):
    assert t.terminals
    for h in t:
        for k in range(len(h)):
            assert h[:k] in t
    assert all(not t.children(z) for z in t.terminals)
