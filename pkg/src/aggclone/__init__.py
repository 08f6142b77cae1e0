"""Aggregation clones on finite bounded lattices."""

from .basis import chi, decompose_join, decompose_meet, g_table, h_table, mu, oplus, oplus_fold
from .clone import Relation, closure, contains, preserves, unary_insufficiency_witness
from .fntable import FnTable, enumerate_aggregation, is_aggregation, is_monotone, random_monotone_aggregation
from .lattice import Lattice, LatticeSpec, boolean, build_lattice, chain, dual, product
from .terms import evaluate, format_term, parse_term, synthesize, synthesize_dual, term_to_table

__version__ = "0.1.0"

__all__ = [
    "FnTable",
    "Lattice",
    "LatticeSpec",
    "Relation",
    "boolean",
    "build_lattice",
    "chain",
    "chi",
    "closure",
    "contains",
    "decompose_join",
    "decompose_meet",
    "dual",
    "enumerate_aggregation",
    "evaluate",
    "format_term",
    "g_table",
    "h_table",
    "is_aggregation",
    "is_monotone",
    "mu",
    "oplus",
    "oplus_fold",
    "parse_term",
    "preserves",
    "product",
    "random_monotone_aggregation",
    "synthesize",
    "synthesize_dual",
    "term_to_table",
    "unary_insufficiency_witness",
]
