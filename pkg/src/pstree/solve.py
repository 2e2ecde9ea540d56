"""BI and SCBI solutions, strategies, RATS and the ternary fixed point.

Every solver here that the library relies on is computed along two
independent routes and the routes are compared before a result is returned.
"""

from __future__ import annotations

import itertools
import random
from collections.abc import Iterator, Mapping
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import History, PreferenceTree, ROOT, hkey, is_prefix
from .sight import SightFunction
from .visible import VisibleTree, local_max_terminals, visible_tree

Strategy = Mapping[History, str]
Relation = Mapping[History, frozenset]


class InconsistentResult(AssertionError):
    """Two independent routes to the same object disagreed."""


# ---------------------------------------------------------------------------
# solution sets


def bi_set(tree: PreferenceTree) -> frozenset[History]:
    best = max(tree.payoff[z] for z in tree.terminals)
    return frozenset(z for z in tree.terminals if tree.payoff[z] == best)


def local_maxima(tree: PreferenceTree, sight: SightFunction) -> dict[History, frozenset[History]]:
    """``h -> max⪰ Z_h`` for every history."""
    return {h: local_max_terminals(visible_tree(tree, sight, h)) for h in tree.histories}


def _justified(h: History, child: History, lm: frozenset[History]) -> bool:
    return any(is_prefix(child, z) for z in lm)


def scbi_by_filter(tree: PreferenceTree, lm: Mapping[History, frozenset[History]]) -> frozenset[History]:
    out = set()
    for z in tree.terminals:
        if all(_justified(z[:k], z[: k + 1], lm[z[:k]]) for k in range(len(z))):
            out.add(z)
    return frozenset(out)


def scbi_by_forward(tree: PreferenceTree, lm: Mapping[History, frozenset[History]]) -> frozenset[History]:
    out = set()
    stack = [ROOT]
    while stack:
        h = stack.pop()
        kids = tree.children(h)
        if not kids:
            out.add(h)
            continue
        stack.extend(c for c in kids if _justified(h, c, lm[h]))
    return frozenset(out)


def scbi_set(tree: PreferenceTree, sight: SightFunction) -> frozenset[History]:
    """Terminal histories every step of which starts some locally best visible leaf.

    Computed by filtering the terminals and by forward construction; the two
    must agree.
    """
    lm = local_maxima(tree, sight)
    a = scbi_by_filter(tree, lm)
    b = scbi_by_forward(tree, lm)
    if a != b:
        raise InconsistentResult(f"SCBI filter {sorted(a)} != forward {sorted(b)}")
    return a


# ---------------------------------------------------------------------------
# strategies


def all_strategies(tree: PreferenceTree) -> Iterator[dict[History, str]]:
    inner = [h for h in tree.histories if tree.children(h)]
    choices = [[c[-1] for c in tree.children(h)] for h in inner]
    for pick in itertools.product(*choices):
        yield dict(zip(inner, pick))


def random_strategy(tree: PreferenceTree, rng: random.Random) -> dict[History, str]:
    return {h: rng.choice(tree.children(h))[-1] for h in tree.histories if tree.children(h)}


def strategy_count(tree: PreferenceTree) -> int:
    n = 1
    for h in tree.histories:
        n *= max(1, len(tree.children(h)))
    return n


def validate_strategy(tree: PreferenceTree, sigma: Strategy) -> None:
    for h in tree.histories:
        kids = tree.children(h)
        if kids and (h not in sigma or h + (sigma[h],) not in tree):
            raise ValueError(f"strategy has no legal move at {h!r}")


def follow(tree: PreferenceTree, sigma: Strategy, h: History) -> History:
    """Terminal reached from ``h`` by playing ``sigma``."""
    while tree.children(h):
        h = h + (sigma[h],)
    return h


# ---------------------------------------------------------------------------
# classical BI relation


@dataclass(frozen=True)
class BiRelation:
    """Set-valued move relation: ``moves[h]`` is the set of chosen children."""

    moves: Mapping[History, frozenset[History]]

    def __getitem__(self, h):
        return self.moves.get(h, frozenset())

    def pairs(self) -> frozenset[tuple[History, History]]:
        return frozenset((x, y) for x, ys in self.moves.items() for y in ys)

    def strategies(self) -> Iterator[dict[History, str]]:
        """Every deterministic selection from the relation."""
        inner = sorted((h for h, ys in self.moves.items() if ys), key=hkey)
        for pick in itertools.product(*[sorted(self.moves[h]) for h in inner]):
            yield {h: y[-1] for h, y in zip(inner, pick)}


def _nodes(t) -> list[History]:
    return sorted(t.histories, key=hkey)


def bi_by_values(t) -> dict[History, frozenset[History]]:
    """Backward values: argmax children of the subtree maximum."""
    value: dict[History, Fraction] = {}
    moves: dict[History, frozenset[History]] = {}
    for h in reversed(_nodes(t)):
        kids = t.children(h)
        if not kids:
            value[h] = t.payoff[h]
            continue
        best = max(value[c] for c in kids)
        value[h] = best
        moves[h] = frozenset(c for c in kids if value[c] == best)
    return moves


def _reach_best(t, sigma: Mapping[History, set], order: list[History]) -> dict[History, Optional[Fraction]]:
    """Best terminal payoff reachable through ``sigma*``; ``None`` when none is."""
    best: dict[History, Optional[Fraction]] = {}
    for h in reversed(order):
        if t.is_terminal(h):
            best[h] = t.payoff[h]
            continue
        vals = [best[y] for y in sigma.get(h, ()) if best[y] is not None]
        best[h] = max(vals) if vals else None
    return best


def bi_by_pruning(t) -> dict[History, frozenset[History]]:
    """Greatest fixed point of confluence-violation pruning from the full move relation.

    A move ``x -> y`` survives a round iff some terminal reached from ``y``
    through the current relation is at least as good as every terminal
    reached the same way from any sibling ``z`` of ``y``.
    """
    order = _nodes(t)
    sigma = {h: set(t.children(h)) for h in order if t.children(h)}
    while True:
        best = _reach_best(t, sigma, order)
        drop = []
        for x, ys in sigma.items():
            rivals = [best[z] for z in t.children(x) if best[z] is not None]
            top = max(rivals) if rivals else None
            for y in ys:
                if best[y] is None or (top is not None and best[y] < top):
                    drop.append((x, y))
        if not drop:
            break
        for x, y in drop:
            sigma[x].discard(y)
    return {x: frozenset(ys) for x, ys in sigma.items()}


def classical_bi_relation(t) -> BiRelation:
    """The BI move relation of a tree (or of a :class:`VisibleTree`)."""
    a = bi_by_values(t)
    b = bi_by_pruning(t)
    if a != b:
        raise InconsistentResult("backward values and confluence pruning disagree")
    return BiRelation(a)


# ---------------------------------------------------------------------------
# ternary relation and its diagonal


@dataclass(frozen=True)
class BiSightRelation:
    """Triples ``(x, y, z)``: inside the view from ``x``, ``z`` is a best move from ``y``."""

    triples: frozenset[tuple[History, History, History]]

    def slice(self, x: History) -> dict[History, frozenset[History]]:
        out: dict[History, set[History]] = {}
        for a, y, z in self.triples:
            if a == x:
                out.setdefault(y, set()).add(z)
        return {y: frozenset(zs) for y, zs in out.items()}

    def by_viewpoint(self) -> dict[History, dict[History, frozenset[History]]]:
        out: dict[History, dict[History, set[History]]] = {}
        for x, y, z in self.triples:
            out.setdefault(x, {}).setdefault(y, set()).add(z)
        return {x: {y: frozenset(zs) for y, zs in d.items()} for x, d in out.items()}


def _gfp_slice(tree: PreferenceTree, view: VisibleTree) -> set[tuple[History, History]]:
    """Prune guarded pairs ``(y, z)`` of the view until none violates the body."""
    order = sorted(view.histories, key=hkey)
    ends = view.terminals
    rel = {(y, z) for y in order for z in view.children(y)}
    while True:
        succ: dict[History, list[History]] = {}
        for y, z in rel:
            succ.setdefault(y, []).append(z)
        best: dict[History, Optional[Fraction]] = {}
        for n in reversed(order):
            if n in ends:
                best[n] = tree.payoff[n]
            else:
                vals = [best[m] for m in succ.get(n, ()) if best[m] is not None]
                best[n] = max(vals) if vals else None
        drop = set()
        for y, z in rel:
            for t in view.children(y):
                # vacuous when nothing is reachable from t
                if best[t] is None:
                    continue
                if best[z] is None or best[z] < best[t]:
                    drop.add((y, z))
                    break
            else:
                if best[z] is None:
                    drop.add((y, z))
        if not drop:
            return rel
        rel -= drop


def bi_sight_gfp(tree: PreferenceTree, sight: SightFunction, check: bool = True) -> BiSightRelation:
    """Greatest ternary relation satisfying the sight-guarded rationality clause.

    With ``check`` each viewpoint slice is compared with the classical BI
    relation of the visible tree at that viewpoint.
    """
    triples = set()
    for x in tree.histories:
        view = visible_tree(tree, sight, x)
        rel = _gfp_slice(tree, view)
        if check:
            expect = classical_bi_relation(view).pairs()
            if frozenset(rel) != expect:
                raise InconsistentResult(f"bi_sight slice at {x!r} differs from local BI")
        triples.update((x, y, z) for y, z in rel)
    return BiSightRelation(frozenset(triples))


def scbi_relation(rel: BiSightRelation) -> dict[History, frozenset[History]]:
    """Diagonal ``scbi(x, y) <-> bi_sight(x, x, y)``."""
    out: dict[History, set[History]] = {}
    for x, y, z in rel.triples:
        if x == y:
            out.setdefault(x, set()).add(z)
    return {x: frozenset(zs) for x, zs in out.items()}


def relation_outcomes(tree: PreferenceTree, moves: Mapping[History, frozenset[History]], start: History = ROOT) -> frozenset[History]:
    """Terminals of ``tree`` reached from ``start`` along ``moves``."""
    out = set()
    stack = [start]
    while stack:
        h = stack.pop()
        if tree.is_terminal(h):
            out.add(h)
            continue
        stack.extend(moves.get(h, ()))
    return frozenset(out)


# ---------------------------------------------------------------------------
# RATS


@dataclass(frozen=True)
class RatsWitness:
    history: History
    move: Optional[str]
    alternative: Optional[str]


@dataclass(frozen=True)
class RatsResult:
    ok: bool
    witness: Optional[RatsWitness] = None

    def __bool__(self):
        return self.ok


def local_relation(view: VisibleTree, strategy: Optional[Strategy]) -> dict[History, frozenset[History]]:
    """``σ_h``: the strategy restricted to the view, or local BI when ``None``."""
    if strategy is None:
        return dict(classical_bi_relation(view).moves)
    out = {}
    for y in view.histories:
        if y in strategy and not view.is_terminal(y):
            nxt = y + (strategy[y],)
            out[y] = frozenset({nxt}) if nxt in view.histories else frozenset()
    return out


def _view_outcomes(view: VisibleTree, rel, start: History) -> set[History]:
    out = set()
    stack = [start]
    while stack:
        y = stack.pop()
        if y in view.terminals:
            out.add(y)
            continue
        stack.extend(rel.get(y, ()))
    return out


def rats_at(tree: PreferenceTree, view: VisibleTree, strategy: Optional[Strategy] = None) -> Optional[RatsWitness]:
    h = view.root
    if h in view.terminals:
        return None
    rel = local_relation(view, strategy)
    own = _view_outcomes(view, rel, h)
    alts = {c: _view_outcomes(view, rel, c) for c in view.children(h)}
    worst_gap = None
    for u in own:
        beaten = [c for c, ws in alts.items() if any(tree.payoff[w] > tree.payoff[u] for w in ws)]
        if not beaten:
            return None
        worst_gap = worst_gap or beaten[0]
    if strategy is not None:
        move = strategy.get(h)
    else:
        chosen = sorted(rel.get(h, ()))
        move = chosen[0][-1] if chosen else None
    if worst_gap is None:
        # no outcome at all along the strategy: any alternative with an outcome beats it
        better = sorted(c for c, ws in alts.items() if ws)
        worst_gap = better[0] if better else None
    return RatsWitness(h, move, worst_gap[-1] if worst_gap else None)


def rats_check(tree: PreferenceTree, sight: SightFunction, strategy: Optional[Strategy] = None) -> RatsResult:
    """Check the local rationality property at every history.

    Without ``strategy`` the local BI strategy of each visible tree is used,
    for which the property always holds.
    """
    for h in tree.histories:
        w = rats_at(tree, visible_tree(tree, sight, h), strategy)
        if w is not None:
            return RatsResult(False, w)
    return RatsResult(True)
