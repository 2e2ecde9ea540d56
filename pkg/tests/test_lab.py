import io

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pstree.core import path
from pstree.errors import NotFound
from pstree.fixtures import fig1_case1_sight, fig1_case1_superset, fig1_case2_sight, fig1_tree, fig2_sight, fig2_tree
from pstree.fixtures import fig3_sight, fig3_tree
from pstree.lab import (
    FACT6_CASES, GenSpec, NestedWitness, hunt_fact6, hunt_schema, instances, non_monotone, random_instance,
    sweep, sweep_custom, verify_nested, write_csv,
)
from pstree.sight import full_sight, validate_sight
from pstree.solve import bi_set, scbi_set


def test_depth_zero_instance():
    t, s = random_instance(GenSpec(depth=0))
    assert len(t) == 1


def test_determinism_and_distinct_payoffs():
    spec = GenSpec(depth=3, branching=3, seed=42)
    assert random_instance(spec) == random_instance(spec)
    t, _ = random_instance(spec)
    assert len(set(t.payoff.values())) == len(t)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**64 - 1), st.sampled_from(["full", "random", "horizon:1", "random:7"]))
def test_generated_instances_are_valid(seed, kind):
    t, s = random_instance(GenSpec(depth=3, branching=3, sight=kind, seed=seed))
    assert validate_sight(t, dict(s.items())) == []
    top = max(t.payoff[z] for z in bi_set(t))
    assert all(t.payoff[z] <= top for z in scbi_set(t, s))
    if kind == "full":
        assert scbi_set(t, s) == bi_set(t)


def _witness(case, t, s1, s2):
    (z1,), (z2,) = scbi_set(t, s1), scbi_set(t, s2)
    return NestedWitness(case, t, s1, s2, z1, z2, -1)


def test_shipped_nested_witnesses():
    a = _witness("a", fig1_tree(), fig1_case1_sight(), fig1_case1_superset())
    assert (a.z1, a.z2) == (path("R.R"), path("L.L")) and verify_nested(a)
    b = _witness("b", fig2_tree(), fig2_sight(), full_sight(fig2_tree()))
    assert (b.z1, b.z2) == (path("L.R"), path("L.L")) and verify_nested(b)
    c = _witness("c", fig3_tree(), fig3_sight(), fig3_sight())
    assert verify_nested(c)


@pytest.mark.parametrize("case", sorted(FACT6_CASES))
def test_hunt_finds_each_case(case):
    w = hunt_fact6(case, trials=10_000, seed=0, max_depth=3)
    assert verify_nested(w) and w.tree.depth <= 3


def test_schema_hunts():
    c = hunt_schema("!Sight-Preference", trials=100)
    assert c.source.startswith("fixture:")
    c = hunt_schema("visible-TM", trials=100)
    assert c.source == "fixture:fig2"
    with pytest.raises(NotFound):
        hunt_schema("T_s", trials=20)
    with pytest.raises(ValueError):
        hunt_schema("no-such-schema", trials=1)


def test_sweep_rows():
    rows = sweep(range(0, 5), trials=40, seed=3)
    for r in rows:
        if r["horizon"] >= r["depth"]:
            assert r["scbi_payoff"] == r["bi_payoff"]
        if r["depth"] == 0:
            assert r["scbi_payoff"] == r["bi_payoff"]
        if r["scbi_payoff"] is not None:
            assert r["scbi_payoff"] <= r["bi_payoff"]


def test_sweep_is_deterministic():
    a, b = io.StringIO(), io.StringIO()
    write_csv(sweep(range(3), 20, seed=9), a)
    write_csv(sweep(range(3), 20, seed=9), b)
    assert a.getvalue() == b.getvalue()
    assert a.getvalue().splitlines()[0] == "seed,depth,branch,horizon,scbi_payoff,bi_payoff"


def test_more_sight_can_hurt():
    rows = sweep_custom(fig1_tree(), [("case1", fig1_case1_sight()), ("case2", fig1_case2_sight())])
    assert [r["scbi_payoff"] for r in rows] == [4, 3]
    assert non_monotone(sweep(range(5), 200, seed=0))


def test_instances_respect_bounds():
    for spec, t, s in instances(200, seed=1, max_depth=3, max_branching=2):
        assert t.depth <= 3 and all(len(t.children(h)) <= 2 for h in t)
