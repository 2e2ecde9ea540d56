import pytest
from hypothesis import given

import oracles
from gen import instances, raw_sights, trees
from hypothesis import strategies as st
from pstree.core import path
from pstree.errors import SightError, UnknownHistory
from pstree.fixtures import fig1_tree, fig2_sight, fig2_tree
from pstree.sight import SightFunction, full_sight, horizon_sight, repair_sight, validate_sight


def P(*xs):
    return {path(x) for x in xs}


def minimal(t):
    return {h: {h} for h in t}


def test_fig2_sight_is_valid():
    raw = {h: set(v) for h, v in fig2_sight().items()}
    assert raw[()] == P(".", "L") and raw[("L",)] == P("L", "L.R") and raw[("R",)] == P("R", "R.L")
    assert validate_sight(fig2_tree(), raw) == []


def test_dc_violation():
    raw = minimal(fig1_tree())
    raw[()] = P(".", "R.L")
    props = {(v.prop, v.witness) for v in validate_sight(fig1_tree(), raw)}
    assert ("DC", ((), ("R",), ("R", "L"))) in props


def test_nf_violation():
    raw = minimal(fig1_tree())
    raw[()] = P(".", "R", "R.L")
    props = {(v.prop, v.witness) for v in validate_sight(fig1_tree(), raw)}
    assert props == {("NF", ((), ("R",), ("R", "L")))}


def test_constructor_rejects_and_unknown_lookup():
    raw = minimal(fig1_tree())
    raw[()] = P("R.L")
    with pytest.raises(SightError):
        SightFunction(fig1_tree(), raw)
    with pytest.raises(UnknownHistory):
        full_sight(fig1_tree())[("Q",)]


def test_repair_case1():
    s = repair_sight(fig1_tree(), {(): P("L.R", "R.L")})
    assert s[()] == P(".", "L", "R", "L.R", "R.L")
    assert s[("L",)] >= P("L", "L.R") and s[("R",)] >= P("R", "R.L")


def test_repair_is_identity_on_valid_input():
    t = fig2_tree()
    assert repair_sight(t, dict(fig2_sight().items())) == fig2_sight()
    assert repair_sight(t, minimal(t)) == horizon_sight(t, 0)


def test_repair_rejects_non_extensions():
    with pytest.raises(SightError):
        repair_sight(fig1_tree(), {("L",): P("R")})


def test_horizons():
    t = fig1_tree()
    assert horizon_sight(t, 2) == full_sight(t)
    assert all(horizon_sight(t, 0)[h] == {h} for h in t)
    assert horizon_sight(t, 1)[()] == P(".", "L", "R")
    with pytest.raises(ValueError):
        horizon_sight(t, -1)


@st.composite
def tree_and_raw(draw):
    t = draw(trees(max_depth=3, max_branch=2))
    return t, draw(raw_sights(t))


@given(tree_and_raw())
def test_repair_is_valid_and_least(case):
    t, raw = case
    s = repair_sight(t, raw)
    assert validate_sight(t, dict(s.items())) == []
    expected = oracles.repair(list(t), raw)
    assert {h: set(v) for h, v in s.items()} == expected


@given(instances(max_depth=3, max_branch=2))
def test_validation_agrees_with_oracle(inst):
    t, s = inst
    raw = {h: set(v) for h, v in s.items()}
    # drop one element to get a possibly invalid map
    for h in t:
        extra = sorted(raw[h] - {h})
        if extra:
            raw[h].discard(extra[-1])
            break
    assert (validate_sight(t, raw) == []) == oracles.sight_ok(list(t), raw)


@given(trees(), st.integers(0, 3))
def test_horizon_family_is_monotone(t, k):
    a, b = horizon_sight(t, k), horizon_sight(t, k + 1)
    assert a.issubset(b)
    assert validate_sight(t, dict(a.items())) == []
