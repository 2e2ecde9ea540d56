"""The three worked trees shipped with the library, with their sights."""

from __future__ import annotations

from .core import History, PreferenceTree, mk_tree, path
from .sight import SightFunction, full_sight, repair_sight


def _p(*names: str) -> list[History]:
    return [path(n) for n in names]


def fig1_tree() -> PreferenceTree:
    """Two stages of L/R; outcome order RR > LL > RL > LR."""
    return mk_tree({
        (): 0, ("L",): 0, ("R",): 0,
        ("L", "L"): 3, ("L", "R"): 1, ("R", "L"): 2, ("R", "R"): 4,
    })


def fig1_case1_raw() -> dict[History, list[History]]:
    # sees LR and RL at the start; RR and RL after moving R
    return {(): _p("L.R", "R.L"), ("R",): _p("R.R", "R.L")}


def fig1_case2_raw() -> dict[History, list[History]]:
    return {(): _p("L.L", "L.R", "R.L")}


def fig1_case1_sight() -> SightFunction:
    return repair_sight(fig1_tree(), fig1_case1_raw())


def fig1_case2_sight() -> SightFunction:
    return repair_sight(fig1_tree(), fig1_case2_raw())


def fig1_case1_superset() -> SightFunction:
    """Case-1 sight extended with LL at the root and at L (a pointwise superset)."""
    raw = {h: set(v) for h, v in fig1_case1_sight().items()}
    raw[()].add(("L", "L"))
    raw[("L",)].add(("L", "L"))
    return SightFunction(fig1_tree(), raw)


def fig2_tree() -> PreferenceTree:
    return mk_tree({
        (): 1, ("L",): 1, ("R",): 2,
        ("L", "L"): 3, ("L", "R"): 1, ("R", "L"): 2,
    })


def fig2_sight() -> SightFunction:
    t = fig2_tree()
    raw = {h: {h} for h in t}
    raw[()] |= {("L",)}
    raw[("L",)] |= {("L", "R")}
    raw[("R",)] |= {("R", "L")}
    return SightFunction(t, raw)


def fig3_tree() -> PreferenceTree:
    return mk_tree({(): 0, ("L",): 1, ("R",): 2, ("L", "L"): 3, ("R", "L"): 2})


def fig3_sight() -> SightFunction:
    return full_sight(fig3_tree())


FIXTURES = {
    "fig1-case1": (fig1_tree, fig1_case1_sight),
    "fig1-case2": (fig1_tree, fig1_case2_sight),
    "fig2": (fig2_tree, fig2_sight),
    "fig3": (fig3_tree, fig3_sight),
}


def all_fixtures() -> dict[str, tuple[PreferenceTree, SightFunction]]:
    return {name: (t(), s()) for name, (t, s) in FIXTURES.items()}
