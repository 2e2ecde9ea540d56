import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from gen import instances, trees
from pstree.core import path
from pstree.errors import UnknownProposition, UnknownStrategy
from pstree.fixtures import all_fixtures, fig1_case1_sight, fig1_tree, fig2_sight, fig2_tree
from pstree.formula import And, At, Box, Dia, End, Leq, Not, Prop, Sigma, View
from pstree.modal import (
    FRAME_SCHEMAS, FrameConfig, ModalChecker, bi_uniqueness, eval_modal, frame_suite, modal_ext, modal_model,
    satisfying_relations, tree_shapes,
)
from pstree.sight import full_sight
from pstree.solve import all_strategies, bi_set, classical_bi_relation, follow, random_strategy
from pstree.textio import parse_formula
from pstree.visible import visible_tree

p = Prop("p")


def test_examples():
    assert eval_modal(fig2_tree(), fig2_sight(), (), Box("BI", At(path("L.L"))))
    assert eval_modal(fig1_tree(), fig1_case1_sight(), (), Box("SCBI", At(path("R.R"))))
    assert not eval_modal(fig2_tree(), fig2_sight(), (), View(Box("BIv", End())))
    f = parse_formula("[view] [BIv] end", fig2_tree())
    assert not eval_modal(fig2_tree(), fig2_sight(), (), f)


def test_sigma_follows_the_strategy_to_the_end():
    t, s = fig2_tree(), fig2_sight()
    sigma = {(): "L", ("L",): "R", ("R",): "L"}
    val = {"p": frozenset({path("L.R")})}
    assert eval_modal(t, s, (), Sigma("s", p), val, {"s": sigma})
    assert not eval_modal(t, s, ("R",), Sigma("s", p), val, {"s": sigma})


def test_unknown_names():
    with pytest.raises(UnknownStrategy):
        eval_modal(fig2_tree(), fig2_sight(), (), Sigma("nope", End()))
    with pytest.raises(UnknownProposition):
        eval_modal(fig2_tree(), fig2_sight(), (), Prop("q"))


def test_fixture_frame_suites():
    refuted = set()
    for name, (t, s) in all_fixtures().items():
        rep = frame_suite(t, s, FrameConfig(random_valuations=20))
        for r in rep.results:
            if r.expected == "valid":
                assert r.verified, (name, r)
            else:
                refuted |= {r.name} if not r.verified else set()
    assert refuted == {n for n, (exp, _, _) in FRAME_SCHEMAS.items() if exp == "invalid"}


def test_fig1_full_sight_best_closure():
    t = fig1_tree()
    assert frame_suite(t, full_sight(t), names=["bi-best-closure"]).ok


def test_fig2_refutations():
    rep = frame_suite(fig2_tree(), fig2_sight())
    assert not rep["BIv-idempotent"].verified
    w = rep["scbi-dominates-strategies"].witness
    assert w is not None and w.state == ()
    # the strategy in the witness reaches something better than the SCBI outcome
    t = fig2_tree()
    assert t.payoff[follow(t, w.strategy, ())] > t.payoff[path("L.R")]


def test_uniqueness_small():
    rep = bi_uniqueness(5)
    assert rep.ok and not rep.failures
    assert rep.trees > len(tree_shapes(5))


# -- pointwise oracle for the tree operators ---------------------------------------------


def _oracle(t, f, val):
    payoff = dict(t.payoff)
    moves = oracles.bi_moves(payoff)
    scbi = None

    def succ(op, h):
        if op == "move":
            return set(t.children(h))
        if op in ("bi", "best"):
            return moves.get(h, set())
        if op == "bi*":
            out, stack = {h}, [h]
            while stack:
                for c in moves.get(stack.pop(), ()):
                    out.add(c)
                    stack.append(c)
            return out
        if op == "BI":
            return oracles.bi(payoff)
        raise KeyError(op)

    def holds(h, g):
        if isinstance(g, Prop):
            return h in val[g.name]
        if isinstance(g, End):
            return t.is_terminal(h)
        if isinstance(g, Not):
            return not holds(h, g.arg)
        if isinstance(g, And):
            return all(holds(h, a) for a in g.args)
        if isinstance(g, Box):
            return all(holds(x, g.arg) for x in succ(g.op, h))
        if isinstance(g, Dia):
            return any(holds(x, g.arg) for x in succ(g.op, h))
        if isinstance(g, Leq):
            return any(holds(u, g.arg) and payoff[u] >= payoff[h] for u in t)
        raise TypeError(g)

    return {h for h in t if holds(h, f)}


def modal_formulas():
    leaf = st.sampled_from([p, End()])
    ops = st.sampled_from(["move", "bi", "best", "bi*", "BI"])
    return st.recursive(
        leaf,
        lambda sub: st.one_of(
            sub.map(Not), st.tuples(sub, sub).map(And), sub.map(Leq),
            st.tuples(ops, sub).map(lambda a: Box(*a)), st.tuples(ops, sub).map(lambda a: Dia(*a)),
        ),
        max_leaves=6,
    )


@settings(max_examples=150, deadline=None)
@given(instances(), modal_formulas(), st.data())
def test_tree_operators_match_oracle(inst, f, data):
    t, s = inst
    val = {"p": frozenset(data.draw(st.sets(st.sampled_from(t.histories))))}
    assert modal_ext(modal_model(t, s), f, val) == _oracle(t, f, val)


@given(instances(), st.data())
def test_best_and_bi_coincide(inst, data):
    t, s = inst
    val = {"p": frozenset(data.draw(st.sets(st.sampled_from(t.histories))))}
    m = modal_model(t, s)
    for box in (Box, Dia):
        assert modal_ext(m, box("best", p), val) == modal_ext(m, box("bi", p), val)


@given(trees(), st.integers(0, 2**32))
def test_bi_outcomes_dominate_every_strategy(t, seed):
    sigma = random_strategy(t, random.Random(seed))
    z2 = follow(t, sigma, ())
    assert all(t.payoff[z] >= t.payoff[z2] for z in bi_set(t))


@given(instances())
def test_local_bi_first_move_is_subjectively_best(inst):
    t, s = inst
    payoff, sd = oracles.as_dicts(t, s)
    for h in t:
        v = visible_tree(t, s, h)
        kids = v.children(h)
        if not kids:
            continue
        chosen = classical_bi_relation(v)[h]
        assert chosen
        for c in chosen:
            assert all(v.payoff[c] >= v.payoff[d] for d in kids)


@settings(max_examples=30, deadline=None)
@given(instances(max_depth=3, max_branch=2))
def test_valid_frame_schemas_on_random_instances(inst):
    t, s = inst
    rep = frame_suite(t, s, FrameConfig(random_valuations=10, max_terminal_subsets=32, max_strategies=8))
    assert rep.ok, [r for r in rep.results if r.unexpected]


def test_computed_bi_is_the_only_relation_satisfying_the_axiom():
    t = fig1_tree()
    rels = satisfying_relations(t)
    expected = {h: tuple(sorted(v)) for h, v in classical_bi_relation(t).moves.items() if v}
    assert len(rels) == 1
    assert {h: tuple(sorted(v)) for h, v in rels[0].items() if v} == expected
