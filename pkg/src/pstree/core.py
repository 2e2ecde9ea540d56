"""Histories, finite preference trees and the objective preference preorder.

A history is a tuple of action names; the root is the empty tuple.  Payoffs
are exact rationals (:class:`fractions.Fraction`), so every comparison made by
the solvers is exact.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from enum import Enum
from fractions import Fraction
from typing import Union

from .errors import DuplicateHistory, MissingPrefix, MissingRoot, UnknownHistory

History = tuple[str, ...]
ROOT: History = ()

Number = Union[int, Fraction, str]


def is_prefix(a: History, b: History) -> bool:
    """``a ⊴ b``: reflexive prefix."""
    return len(a) <= len(b) and b[: len(a)] == a


def is_strict_prefix(a: History, b: History) -> bool:
    return len(a) < len(b) and b[: len(a)] == a


def prefixes(h: History, strict: bool = False) -> Iterator[History]:
    """All prefixes of ``h``, shortest first."""
    stop = len(h) if strict else len(h) + 1
    for k in range(stop):
        yield h[:k]


def hkey(h: History):
    """Canonical sort key: by length, then lexicographically."""
    return (len(h), h)


def fmt(h: History) -> str:
    return "." if not h else ".".join(h)


def fmt_set(hs: Iterable[History]) -> str:
    return "{" + ", ".join(fmt(h) for h in sorted(hs, key=hkey)) + "}"


def path(text: str) -> History:
    """Parse ``"."`` / ``"L.R"`` / ``"LR"``-free dotted paths into a history."""
    text = text.strip()
    if text in ("", "."):
        return ROOT
    return tuple(text.split("."))


class Pref(Enum):
    BETTER = "≻"
    SAME = "∼"
    WORSE = "≺"


class PreferenceTree:
    """Prefix-closed finite set of histories with a rational payoff on each.

    Instances are immutable; all derived structure is computed once on
    construction.
    """

    __slots__ = ("_payoff", "_children", "_order", "_terminals", "_hash")

    def __init__(self, payoff: Mapping[History, Number]):
        pay = {tuple(h): Fraction(v) for h, v in payoff.items()}
        if ROOT not in pay:
            raise MissingRoot()
        for h in sorted(pay, key=hkey):
            if h and h[:-1] not in pay:
                raise MissingPrefix(h, h[:-1])
        children: dict[History, list[History]] = {h: [] for h in pay}
        for h in pay:
            if h:
                children[h[:-1]].append(h)
        self._payoff = pay
        self._children = {h: tuple(sorted(c)) for h, c in children.items()}
        self._order = tuple(sorted(pay, key=hkey))
        self._terminals = frozenset(h for h, c in self._children.items() if not c)
        self._hash = None

    # -- container protocol -------------------------------------------------
    def __contains__(self, h) -> bool:
        return h in self._payoff

    def __iter__(self) -> Iterator[History]:
        return iter(self._order)

    def __len__(self) -> int:
        return len(self._payoff)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PreferenceTree):
            return NotImplemented
        return self._payoff == other._payoff

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._payoff.items()))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{fmt(h)}: {self._payoff[h]}" for h in self._order)
        return f"PreferenceTree({{{body}}})"

    # -- accessors ----------------------------------------------------------
    @property
    def root(self) -> History:
        return ROOT

    @property
    def histories(self) -> tuple[History, ...]:
        """Histories in canonical (breadth-first, lexicographic) order."""
        return self._order

    @property
    def payoff(self) -> Mapping[History, Fraction]:
        return self._payoff

    @property
    def terminals(self) -> frozenset[History]:
        return self._terminals

    def check(self, h: History) -> History:
        if h not in self._payoff:
            raise UnknownHistory(h)
        return h

    def children(self, h: History) -> tuple[History, ...]:
        try:
            return self._children[h]
        except KeyError:
            raise UnknownHistory(h) from None

    def is_terminal(self, h: History) -> bool:
        return not self.children(h)

    def subtree(self, h: History) -> Iterator[History]:
        """``H|_h``: every history extending ``h`` (including ``h``)."""
        self.check(h)
        stack = [h]
        while stack:
            x = stack.pop()
            yield x
            stack.extend(self._children[x])

    @property
    def depth(self) -> int:
        return max(len(h) for h in self._order)


def mk_tree(entries: Iterable[tuple[History, Number]] | Mapping[History, Number]) -> PreferenceTree:
    """Build and validate a tree from ``(history, payoff)`` pairs.

    Raises :class:`DuplicateHistory`, :class:`MissingRoot` or
    :class:`MissingPrefix`.
    """
    if isinstance(entries, Mapping):
        entries = entries.items()
    pay: dict[History, Number] = {}
    for h, v in entries:
        h = tuple(h)
        if h in pay:
            raise DuplicateHistory(h)
        pay[h] = v
    if not pay:
        raise MissingRoot()
    return PreferenceTree(pay)


def terminals(tree: PreferenceTree) -> frozenset[History]:
    return tree.terminals


def actions_at(tree: PreferenceTree, h: History) -> frozenset[str]:
    return frozenset(c[-1] for c in tree.children(h))


def prefer(tree: PreferenceTree, h1: History, h2: History) -> Pref:
    p1 = tree.payoff[tree.check(h1)]
    p2 = tree.payoff[tree.check(h2)]
    if p1 > p2:
        return Pref.BETTER
    if p1 < p2:
        return Pref.WORSE
    return Pref.SAME


def weakly_prefers(tree: PreferenceTree, h1: History, h2: History) -> bool:
    """``h1 ⪰ h2``."""
    return prefer(tree, h1, h2) is not Pref.WORSE
