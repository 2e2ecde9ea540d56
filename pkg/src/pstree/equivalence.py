"""Preference-sight consistency, sight-reachability, local optimality and the
BI/SCBI equivalence verdict."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .core import History, PreferenceTree, hkey, is_prefix, prefixes
from .errors import NotSightReachable, NotTerminal
from .sight import SightFunction
from .solve import bi_set, scbi_set
from .visible import local_max_terminals, visible_tree


@dataclass(frozen=True)
class Check:
    """Boolean verdict plus the first witness of failure (``None`` on success)."""

    ok: bool
    witness: Optional[tuple] = None
    reason: str = ""

    def __bool__(self):
        return self.ok


# ---------------------------------------------------------------------------
# consistency


def consistency_violations(tree: PreferenceTree, sight: SightFunction) -> list[tuple[History, History, History]]:
    """All ``(h, h1, h2)`` where ``h1 ⪰ h2`` and ``h1 ⪰_h h2`` disagree."""
    out = []
    for h in tree.histories:
        v = visible_tree(tree, sight, h)
        hs = sorted(v.histories, key=hkey)
        for h1 in hs:
            for h2 in hs:
                obj = tree.payoff[h1] >= tree.payoff[h2]
                subj = v.payoff[h1] >= v.payoff[h2]
                if obj != subj:
                    out.append((h, h1, h2))
    return out


def _witness_rank(tree: PreferenceTree, sight: SightFunction, w) -> tuple:
    # Prefer strict reversals between sibling moves: they are the failures
    # that change a decision.
    h, h1, h2 = w
    v = visible_tree(tree, sight, h)
    po, ps = tree.payoff, v.payoff
    reversal = (po[h1] - po[h2]) * (ps[h1] - ps[h2]) < 0
    siblings = bool(h1) and bool(h2) and h1[:-1] == h2[:-1]
    return (not (reversal and siblings), not reversal)


def is_ps_consistent(tree: PreferenceTree, sight: SightFunction) -> Check:
    """Objective and subjective preference agree on every visible pair.

    On failure the witness is ``(h, h1, h2)`` with ``h1 ⪰_h h2`` but not
    ``h1 ⪰ h2`` (or the converse); strict reversals between sibling moves are
    reported first.
    """
    bad = consistency_violations(tree, sight)
    if not bad:
        return Check(True)
    ranked = sorted(bad, key=lambda w: _witness_rank(tree, sight, w))
    return Check(False, ranked[0], "preference-sight inconsistent")


# ---------------------------------------------------------------------------
# conditions of the equivalence theorem


def _require_terminal(tree: PreferenceTree, h: History) -> None:
    tree.check(h)
    if not tree.is_terminal(h):
        raise NotTerminal(h)


def is_sight_reachable(tree: PreferenceTree, sight: SightFunction, h_star: History) -> Check:
    """Every one-step extension along ``h_star`` is visible from its parent.

    Witness: ``(h, ha)`` with ``ha`` invisible at ``h``.
    """
    _require_terminal(tree, h_star)
    for k in range(len(h_star)):
        h, step = h_star[:k], h_star[: k + 1]
        if step not in sight[h]:
            return Check(False, (h, step), "next step not visible")
    return Check(True)


def is_locally_optimal(
    tree: PreferenceTree,
    sight: SightFunction,
    h_star: History,
    require_reachable: bool = True,
) -> Check:
    """Condition II for a terminal history.

    For every prefix ``h`` of ``h_star`` and every visible leaf ``t`` of
    ``T_h`` that is a prefix of ``h_star``: ``t`` is maximal among the visible
    leaves, and a visible leaf ties with ``t`` exactly when it is a prefix of
    some BI history.  Prefixes ``h`` whose visible leaves include no prefix of
    ``h_star`` impose nothing.
    """
    _require_terminal(tree, h_star)
    if require_reachable:
        reach = is_sight_reachable(tree, sight, h_star)
        if not reach:
            raise NotSightReachable(h_star, reach.witness)
    bi = bi_set(tree)
    pay = tree.payoff
    for h in prefixes(h_star):
        v = visible_tree(tree, sight, h)
        on_path = [t for t in v.terminals if is_prefix(t, h_star)]
        if not on_path:
            continue
        (t,) = on_path  # visible leaves form an antichain
        top = max(pay[z] for z in v.terminals)
        if pay[t] != top:
            return Check(False, (h, t, None), "visible prefix not maximal")
        for t2 in sorted(v.terminals, key=hkey):
            tied = pay[t2] == pay[t]
            extends = any(is_prefix(t2, z) for z in bi)
            if tied != extends:
                return Check(False, (h, t, t2), "tie does not match BI continuation")
    return Check(True)


def follows_local_maxima(tree: PreferenceTree, sight: SightFunction, h_star: History) -> Check:
    """At every strict prefix ``h``, some best visible leaf continues along ``h_star``.

    This is exactly membership of ``h_star`` in SCBI, phrased per history; it
    is the step-wise condition that makes the equivalence exact (see README).
    """
    _require_terminal(tree, h_star)
    for k in range(len(h_star)):
        h, step = h_star[:k], h_star[: k + 1]
        lm = local_max_terminals(visible_tree(tree, sight, h))
        if not any(is_prefix(step, z) for z in lm):
            return Check(False, (h, step), "no best visible leaf continues the history")
    return Check(True)


# ---------------------------------------------------------------------------
# verdict


@dataclass(frozen=True)
class HistoryConditions:
    sight_reachable: Check
    locally_optimal: Optional[Check]  # None when condition I already failed

    @property
    def ok(self) -> bool:
        return bool(self.sight_reachable) and bool(self.locally_optimal)


@dataclass(frozen=True)
class EquivalenceReport:
    bi: frozenset[History]
    scbi: frozenset[History]
    per_bi_history: dict[History, HistoryConditions] = field(hash=False)
    consistent: Check
    distinct_payoffs: bool

    @property
    def equal(self) -> bool:
        return self.bi == self.scbi

    @property
    def conditions_hold(self) -> bool:
        return all(c.ok for c in self.per_bi_history.values())

    @property
    def theorem_agrees(self) -> bool:
        """Whether ``equal`` matches the verdict of conditions I and II."""
        return self.equal == self.conditions_hold


def equivalence_verdict(tree: PreferenceTree, sight: SightFunction) -> EquivalenceReport:
    """Compute BI, SCBI and both conditions for each BI history.

    The comparison between the two sides is reported in
    :attr:`EquivalenceReport.theorem_agrees`, not enforced.
    """
    bi = bi_set(tree)
    scbi = scbi_set(tree, sight)
    per = {}
    for z in sorted(bi, key=hkey):
        reach = is_sight_reachable(tree, sight, z)
        opt = is_locally_optimal(tree, sight, z) if reach else None
        per[z] = HistoryConditions(reach, opt)
    values = list(tree.payoff.values())
    return EquivalenceReport(
        bi=bi,
        scbi=scbi,
        per_bi_history=per,
        consistent=is_ps_consistent(tree, sight),
        distinct_payoffs=len(set(values)) == len(values),
    )
