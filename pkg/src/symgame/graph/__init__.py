"""Labeled-graph encodings of games and the automorphism search engine."""

from .bridge import (IsoCoset, automorphism_to_symmetry, find_isomorphism, full_symmetry_group,
                     game_to_labeled_graph, hat_game, player_symmetries,
                     symmetry_to_automorphism)
from .labeled import LabeledGraph, brute_force_automorphisms, graph_from_dict
from .search import AutomorphismGroup, labeled_graph_automorphisms

__all__ = [
    "IsoCoset", "automorphism_to_symmetry", "find_isomorphism", "full_symmetry_group",
    "game_to_labeled_graph", "hat_game", "player_symmetries", "symmetry_to_automorphism",
    "LabeledGraph", "brute_force_automorphisms", "graph_from_dict", "AutomorphismGroup",
    "labeled_graph_automorphisms",
]
