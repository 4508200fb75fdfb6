"""Lattice models: percolation exploration, harmonic explorer, LERW, UST."""

from .graphs import (LatticeGraph, SpanningTree, cycle_graph, grid_graph, lerw,
                     loop_erase, path_graph, random_walk, spanning_tree_count, wilson_ust)
from .hexlattice import (BLUE, UNSET, YELLOW, HexColoring, LatticePath, crossing_event_rect,
                         harmonic_explorer, harmonic_values, percolation_explore,
                         reveal_path, run_harmonic_explorer)
from .peano import PeanoCurve, PeanoDomain, dual_tree, peano_curve, primal_tree
from .unionfind import UnionFind

__all__ = [
    "BLUE", "YELLOW", "UNSET", "HexColoring", "LatticePath", "percolation_explore",
    "reveal_path", "harmonic_explorer", "run_harmonic_explorer", "harmonic_values",
    "crossing_event_rect", "LatticeGraph", "SpanningTree", "grid_graph", "cycle_graph",
    "path_graph", "loop_erase", "random_walk", "lerw", "wilson_ust", "spanning_tree_count",
    "PeanoDomain", "PeanoCurve", "dual_tree", "primal_tree", "peano_curve", "UnionFind",
]
