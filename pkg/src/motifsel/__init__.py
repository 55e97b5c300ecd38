"""Frequent subgraph mining on protein contact graphs and selection of
unsubstituted patterns with amino-acid substitution matrices."""

__version__ = "0.1.0"

from .graph import CanonicalCode, GraphError, LabeledGraph, canonical_code, read_graphs, write_graphs
from .patterns import Pattern, PatternSet, format_patterns, parse_patterns
from .substitution import SubstitutionMatrix, load_matrix, parse_matrix
from .miner import MiningConfig, brute_force_mine, mine
from .selector import SelectionConfig, SelectionReport, reference_select, select, verify_selection

__all__ = [
    "CanonicalCode", "GraphError", "LabeledGraph", "canonical_code", "read_graphs",
    "write_graphs", "Pattern", "PatternSet", "format_patterns", "parse_patterns",
    "SubstitutionMatrix", "load_matrix", "parse_matrix", "MiningConfig", "brute_force_mine",
    "mine", "SelectionConfig", "SelectionReport", "reference_select", "select",
    "verify_selection",
]
