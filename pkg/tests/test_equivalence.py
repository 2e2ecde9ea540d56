from pathlib import Path

import pytest
from hypothesis import given

import oracles
from gen import instances, trees
from pstree.core import path
from pstree.equivalence import (
    equivalence_verdict, follows_local_maxima, is_locally_optimal, is_ps_consistent, is_sight_reachable,
)
from pstree.errors import NotSightReachable, NotTerminal
from pstree.fixtures import fig1_case2_sight, fig1_tree, fig2_sight, fig2_tree, fig3_sight, fig3_tree
from pstree.sight import full_sight, horizon_sight
from pstree.solve import bi_set, scbi_set
from pstree.textio import load_pst

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def test_consistency_examples():
    c = is_ps_consistent(fig3_tree(), fig3_sight())
    assert not c and c.witness == ((), ("L",), ("R",))
    assert is_ps_consistent(fig2_tree(), fig2_sight())
    t = fig1_tree()
    assert is_ps_consistent(t, horizon_sight(t, 0))


def test_sight_reachability_examples():
    c = is_sight_reachable(fig2_tree(), fig2_sight(), path("L.L"))
    assert not c and c.witness == (("L",), ("L", "L"))
    assert is_sight_reachable(fig3_tree(), fig3_sight(), path("L.L"))
    t = fig1_tree()
    assert all(is_sight_reachable(t, full_sight(t), z) for z in t.terminals)
    with pytest.raises(NotTerminal):
        is_sight_reachable(t, full_sight(t), ("L",))


def test_local_optimality_examples():
    assert is_locally_optimal(fig3_tree(), fig3_sight(), path("L.L"))
    with pytest.raises(NotSightReachable):
        is_locally_optimal(fig1_tree(), fig1_case2_sight(), path("R.R"))
    t = fig1_tree()
    assert is_locally_optimal(t, full_sight(t), path("R.R"))


def test_verdict_examples():
    r = equivalence_verdict(fig2_tree(), fig2_sight())
    assert not r.equal and not r.per_bi_history[path("L.L")].sight_reachable
    assert r.consistent  # consistent yet different outcomes
    r = equivalence_verdict(fig3_tree(), fig3_sight())
    assert r.equal and r.per_bi_history[path("L.L")].ok
    assert not r.consistent  # same outcomes yet inconsistent


def test_conditions_can_hold_while_outcomes_differ():
    t, s = load_pst(FIXTURES / "partial-view.pst")
    r = equivalence_verdict(t, s)
    assert r.bi == {path("a.b")} and r.scbi == {("b",)}
    assert r.conditions_hold and not r.equal and not r.theorem_agrees
    assert not follows_local_maxima(t, s, path("a.b"))


@given(instances())
def test_checkers_match_oracles(inst):
    t, s = inst
    payoff, sd = oracles.as_dicts(t, s)
    assert bool(is_ps_consistent(t, s)) == oracles.consistent(payoff, sd)
    for z in t.terminals:
        assert bool(is_sight_reachable(t, s, z)) == oracles.reachable(sd, z)
        assert bool(is_locally_optimal(t, s, z, require_reachable=False)) == oracles.locally_optimal(payoff, sd, z)
        assert bool(follows_local_maxima(t, s, z)) == oracles.stepwise(payoff, sd, z) == (z in scbi_set(t, s))


@given(instances(distinct=True))
def test_stepwise_condition_characterizes_equality(inst):
    t, s = inst
    r = equivalence_verdict(t, s)
    assert r.equal == all(follows_local_maxima(t, s, z) for z in r.bi)


def test_outcomes_can_agree_while_a_condition_fails():
    t, s = load_pst(FIXTURES / "detour-leaf.pst")
    r = equivalence_verdict(t, s)
    assert r.equal and r.bi == {path("b.a")}
    c = r.per_bi_history[path("b.a")]
    assert c.sight_reachable and not c.locally_optimal
    assert c.locally_optimal.witness == ((), path("b.a"), None)
    assert follows_local_maxima(t, s, path("b.a"))


@given(trees(distinct=True))
def test_full_sight_passes_everything(t):
    r = equivalence_verdict(t, full_sight(t))
    assert r.equal and r.conditions_hold
