"""Worked problems: road map, 8-puzzle and the four-city TSP."""

from .hillclimb import PRESETS, MapProgram, hillclimb_program, map_registry, preset_options
from .puzzle import GOAL, PuzzleProblem, parse_board, puzzle_h, puzzle_successors, solvable
from .roadmap import MapProblem, RoadMap, load_map, map_h, map_successors, parse_map
from .tsp import (
    AnnealSchedule,
    Costs,
    acceptance_probability,
    anneal,
    load_costs,
    tour_cost,
    tsp_anneal_program,
    two_opt,
)

__all__ = [
    "GOAL", "PRESETS", "AnnealSchedule", "Costs", "MapProblem", "MapProgram", "PuzzleProblem", "RoadMap",
    "acceptance_probability", "anneal", "hillclimb_program", "load_costs", "load_map", "map_h",
    "map_registry", "map_successors", "parse_board", "parse_map", "preset_options", "puzzle_h",
    "puzzle_successors", "solvable", "tour_cost", "tsp_anneal_program", "two_opt",
]
