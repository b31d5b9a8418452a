"""Cop vs. gambler pursuit game on connected graphs.

The gambler fixes a distribution over vertices and is redrawn from it every
turn; the cop walks the graph. This package computes exact expected capture
times, optimal cop play against a known gamble, and the standard cop
strategies against an unknown one.
"""

from .evaluator import (
    INFINITE,
    Absorb,
    Loop,
    RandomizedStrategy,
    Walk,
    expected_capture_meta,
    expected_capture_randomized,
    expected_capture_time,
    parse_walk,
    survival_probability,
)
from .gamble import (
    Gamble,
    MetaGamble,
    delta_gamble,
    interval_meta,
    parse_gamble,
    random_sitter_meta,
    uniform_gamble,
    uniform_on_subset,
)
from .graph import Graph, RootedTree, dfs_patrol_order, parse_graph, root_tree, spanning_tree
from .solver import extract_policy_walk, solve_value, start_position_analysis, value_sandwich
from .strategies import (
    StarSweep,
    branch_table,
    cycle_circling_strategy,
    dfs_patrol_strategy,
    known_gamble_walk,
    tree_pursuit_walk,
)

__version__ = "0.1.0"
