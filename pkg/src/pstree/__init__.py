"""Preference-sight trees: backward induction under limited sight, its logic and modal extension."""

from .core import History, PreferenceTree, ROOT, fmt, fmt_set, mk_tree, path
from .equivalence import (
    EquivalenceReport,
    equivalence_verdict,
    follows_local_maxima,
    is_locally_optimal,
    is_ps_consistent,
    is_sight_reachable,
)
from .errors import ParseError, PstError
from .sight import SightFunction, full_sight, horizon_sight, repair_sight, validate_sight
from .solve import bi_set, bi_sight_gfp, classical_bi_relation, rats_check, scbi_relation, scbi_set
from .textio import load_pst, parse_formula, parse_pst, serialize_pst
from .visible import VisibleTree, visible_tree

__all__ = [
    "History", "PreferenceTree", "ROOT", "fmt", "fmt_set", "mk_tree", "path",
    "EquivalenceReport", "equivalence_verdict", "follows_local_maxima", "is_locally_optimal",
    "is_ps_consistent", "is_sight_reachable",
    "ParseError", "PstError",
    "SightFunction", "full_sight", "horizon_sight", "repair_sight", "validate_sight",
    "bi_set", "bi_sight_gfp", "classical_bi_relation", "rats_check", "scbi_relation", "scbi_set",
    "load_pst", "parse_formula", "parse_pst", "serialize_pst",
    "VisibleTree", "visible_tree",
]
