from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from gen import instances, trees
from pstree.core import PreferenceTree, path
from pstree.errors import UnknownHistory
from pstree.fixtures import fig1_case1_sight, fig1_tree, fig2_sight, fig2_tree, fig3_sight, fig3_tree
from pstree.sight import full_sight, horizon_sight
from pstree.visible import local_max_terminals, visible_tree


def test_fig3_subjective_payoffs():
    v = visible_tree(fig3_tree(), fig3_sight(), ())
    assert v.payoff[("L",)] == 3 and v.payoff[("R",)] == 2
    assert v.payoff[()] == 3


def test_horizon_zero_is_a_single_node():
    t = fig1_tree()
    v = visible_tree(t, horizon_sight(t, 0), ("L",))
    assert v.histories == {("L",)} and v.terminals == {("L",)} and v.payoff[("L",)] == t.payoff[("L",)]


def test_local_maxima_examples():
    assert local_max_terminals(visible_tree(fig1_tree(), fig1_case1_sight(), ())) == {path("R.L")}
    assert local_max_terminals(visible_tree(fig2_tree(), fig2_sight(), ())) == {("L",)}
    assert local_max_terminals(visible_tree(fig3_tree(), fig3_sight(), ())) == {path("L.L")}


def test_unknown_history():
    with pytest.raises(UnknownHistory):
        visible_tree(fig3_tree(), fig3_sight(), ("X",))


@given(instances(), st.data())
def test_flag_loop_and_closed_form_agree(inst, data):
    t, s = inst
    h = data.draw(st.sampled_from(t.histories))
    v = visible_tree(t, s, h)
    payoff, sd = oracles.as_dicts(t, s)
    assert dict(v.payoff) == oracles.flag_loop(payoff, sd[h]) == oracles.closed_form(payoff, sd[h])
    assert v.terminals == oracles.leaves(sd[h])
    for z in v.terminals:
        assert v.payoff[z] == t.payoff[z]


@given(instances(), st.data())
def test_visible_tree_is_a_tree(inst, data):
    t, s = inst
    h = data.draw(st.sampled_from(t.histories))
    v = visible_tree(t, s, h)
    rerooted = PreferenceTree({x[len(h):]: v.payoff[x] for x in v.histories})
    assert len(rerooted) == len(v.histories)


@given(trees())
def test_full_sight_sees_all_terminals(t):
    v = visible_tree(t, full_sight(t), ())
    assert v.terminals == t.terminals
    assert v.payoff[()] == max(t.payoff[z] for z in t.terminals)
