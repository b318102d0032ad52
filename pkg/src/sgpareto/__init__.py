"""Anytime Pareto-frontier bounds for multi-target reachability on stochastic games."""

from .game import Objective, StochasticGame, parse_game, serialize_game
from .geometry import Direction, DwcSet, dwc_hull, evaluate, gap_bound, is_subset
from .solver import SolverConfig, mo_bvi, single_dim_solve

__all__ = [
    "Objective",
    "StochasticGame",
    "parse_game",
    "serialize_game",
    "Direction",
    "DwcSet",
    "dwc_hull",
    "evaluate",
    "gap_bound",
    "is_subset",
    "SolverConfig",
    "mo_bvi",
    "single_dim_solve",
]
