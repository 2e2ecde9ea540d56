"""Visible trees and the bottom-up subjective payoff update."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction

from .core import History, PreferenceTree, hkey
from .sight import SightFunction


@dataclass(frozen=True)
class VisibleTree:
    """The part of a tree seen from ``root`` with subjective payoffs.

    ``payoff`` is the subjective payoff ``P_h``; on ``terminals`` (the visible
    leaves) it coincides with the objective payoff.
    """

    root: History
    histories: frozenset[History]
    terminals: frozenset[History]
    payoff: Mapping[History, Fraction] = field(hash=False)
    _children: Mapping[History, tuple[History, ...]] = field(hash=False, repr=False)

    def __contains__(self, h):
        return h in self.histories

    def children(self, h: History) -> tuple[History, ...]:
        return self._children[h]

    def is_terminal(self, h: History) -> bool:
        return not self._children[h]

    def descendants(self, h: History):
        stack = [h]
        while stack:
            x = stack.pop()
            yield x
            stack.extend(self._children[x])

    def as_tree(self) -> PreferenceTree:
        """Re-root at ``root`` and validate as a stand-alone preference tree."""
        n = len(self.root)
        return PreferenceTree({h[n:]: self.payoff[h] for h in self.histories})


def visible_tree(tree: PreferenceTree, sight: SightFunction, h: History) -> VisibleTree:
    """Compute ``T_h``; subjective payoffs propagate visible-leaf maxima upward."""
    tree.check(h)
    seen = sight[h]
    children = {x: tuple(c for c in tree.children(x) if c in seen) for x in seen}
    leaves = frozenset(x for x, c in children.items() if not c)
    pay: dict[History, Fraction] = {}
    # deepest first: every child is settled before its parent
    for x in sorted(seen, key=hkey, reverse=True):
        kids = children[x]
        pay[x] = tree.payoff[x] if not kids else max(pay[c] for c in kids)
    return VisibleTree(h, frozenset(seen), leaves, pay, children)


def local_max_terminals(v: VisibleTree) -> frozenset[History]:
    """Visible leaves of maximal payoff."""
    best = max(v.payoff[z] for z in v.terminals)
    return frozenset(z for z in v.terminals if v.payoff[z] == best)

