"""Hypothesis strategies for trees and sights."""

from __future__ import annotations

from fractions import Fraction

from hypothesis import strategies as st

from pstree.core import PreferenceTree
from pstree.sight import repair_sight

ACTIONS = "abc"


@st.composite
def shapes(draw, max_depth=3, max_branch=3):
    hs = [()]
    frontier = [()]
    while frontier:
        h = frontier.pop()
        if len(h) >= max_depth:
            continue
        n = draw(st.integers(0, max_branch))
        for a in ACTIONS[:n]:
            hs.append(h + (a,))
            frontier.append(h + (a,))
    return hs


@st.composite
def trees(draw, max_depth=3, max_branch=3, distinct=False):
    hs = draw(shapes(max_depth, max_branch))
    if distinct:
        vals = draw(st.lists(st.integers(-20, 20), min_size=len(hs), max_size=len(hs), unique=True))
    else:
        vals = draw(st.lists(st.integers(0, 4), min_size=len(hs), max_size=len(hs)))
    return PreferenceTree({h: Fraction(v) for h, v in zip(hs, vals)})


@st.composite
def raw_sights(draw, tree):
    raw = {}
    for h in tree.histories:
        below = [x for x in tree.subtree(h) if x != h]
        raw[h] = set(draw(st.lists(st.sampled_from(below), max_size=3))) if below else set()
    return raw


@st.composite
def instances(draw, max_depth=3, max_branch=3, distinct=False):
    tree = draw(trees(max_depth, max_branch, distinct))
    return tree, repair_sight(tree, draw(raw_sights(tree)))
