"""Symmetries of finite normal-form games and symmetry-respecting equilibria."""

from .game import Game, load_game, save_game
from .symmetry import OrbitPartition, StrategyProfile, Symmetry, SymmetryGroup

__version__ = "0.1.0"

__all__ = ["Game", "load_game", "save_game", "OrbitPartition", "StrategyProfile", "Symmetry",
           "SymmetryGroup", "__version__"]
