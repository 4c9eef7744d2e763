"""Hill climbing on the road map without a search procedure.

The generated network only describes the map: one node per city and one
arrow per road, each tagged with the heuristic value of the city it leads
to. Which local search happens is decided entirely by the control options
the network is run with (see :data:`PRESETS`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..dsl import parse
from ..engine import ControlOptions, PrimitiveRegistry
from ..errors import ConfigurationError
from ..network import ControlNetwork
from .roadmap import RoadMap, map_h

GOAL_NODE = "reached"


@dataclass
class MapProgram:
    net: ControlNetwork
    options: ControlOptions
    registry: PrimitiveRegistry
    globals: dict = field(default_factory=dict)
    text: str = ""


def preset_options(variant: str = "hill-climbing", *, width: int = 2, seed: int = 0,
                   bound: float | None = None, max_depth: int | None = None) -> ControlOptions:
    """Options for the named local-search variant.

    ``bounded`` prunes roads into cities whose heuristic exceeds ``bound``
    and caps the path length, a cost-bounded cut-off in the spirit of
    branch and bound.
    """
    if variant == "backtracking":
        return ControlOptions()
    if variant == "hill-climbing":
        return ControlOptions(order="best")
    if variant == "irrevocable":
        return ControlOptions(order="best", width=1, backtracking=False)
    if variant == "beam":
        return ControlOptions(order="best", width=width)
    if variant == "stochastic":
        return ControlOptions(order="random", seed=seed)
    if variant == "first-choice":
        return ControlOptions(order="random", width=1, seed=seed)
    if variant == "bounded":
        if bound is None:
            raise ConfigurationError("the bounded preset needs a bound")
        return ControlOptions(order="best", range=(0, bound), max_depth=max_depth)
    raise ConfigurationError(f"unknown preset {variant!r}; choose one of: {', '.join(PRESETS)}")


PRESETS = ("backtracking", "hill-climbing", "irrevocable", "beam", "stochastic", "first-choice", "bounded")


def map_registry(roadmap: RoadMap, goal: str) -> PrimitiveRegistry:
    reg = PrimitiveRegistry()

    @reg.register(evaluator=True)
    def h(env, city):
        return map_h(roadmap, city, goal)

    @reg.register(evaluator=True)
    def toward(env, here, city):
        if frozenset((here, city)) not in roadmap.edges:
            return math.inf
        return map_h(roadmap, city, goal)

    @reg.register(evaluator=True)
    def arrive(env, city):
        return 0 if city == goal else math.inf

    @reg.register()
    def go(env, here, city):
        cost = roadmap.edges.get(frozenset((here, city)))
        if cost is None or city in env["Visited"]:
            return False
        return {"Visited": env["Visited"] + (city,), "Path": env["Path"] + (city,), "Cost": env["Cost"] + cost}

    @reg.register()
    def atGoal(env, city):
        return city == goal

    return reg


def _check(roadmap: RoadMap, *cities: str) -> None:
    for city in cities:
        if city not in roadmap.coords:
            raise ConfigurationError(f"unknown city {city!r}")
    if GOAL_NODE in roadmap.coords:
        raise ConfigurationError(f"a city may not be called {GOAL_NODE!r}")


def hillclimb_text(roadmap: RoadMap, start: str, goal: str) -> str:
    _check(roadmap, start, goal)
    lines = [
        f"# Road map from {start} to {goal}: one node per city, one arrow per road.",
        "SUBNET Main()",
        f"  INIT {start}",
    ]
    lines += [f"  NODE {c}" for c in roadmap.cities if c != start]
    lines.append(f"  NODE {GOAL_NODE} FINISH")
    lines.append(f'  ARROW {goal} -> {GOAL_NODE} [eval=h("{goal}")] : ;')
    for u, v, _ in roadmap.roads():
        lines.append(f'  ARROW {u} -> {v} [eval=h("{v}")] : go("{u}", "{v}") ;')
    return "\n".join(lines) + "\n"


def recursive_hillclimb_text(roadmap: RoadMap, start: str, goal: str) -> str:
    """Same search as a self-calling subnet: each activation makes one move.

    Every arrow of ``Climb`` names one possible next city; roads that do not
    leave the current city score infinity and fail their ``go`` guard.
    """
    _check(roadmap, start, goal)
    lines = [
        f"# Recursive hill climbing from {start} to {goal}.",
        "SUBNET Main()",
        "  INIT begin",
        "  NODE done FINISH",
        f'  ARROW begin -> done [eval=h("{start}")] : call Climb("{start}") ;',
        "",
        "SUBNET Climb(City)",
        "  INIT here",
        "  NODE done FINISH",
        "  ARROW here -> done [eval=arrive(City)] : atGoal(City) ;",
    ]
    for city in roadmap.cities:
        lines.append(f'  ARROW here -> done [eval=toward(City, "{city}")] : go(City, "{city}"), call Climb("{city}") ;')
    return "\n".join(lines) + "\n"


def hillclimb_program(roadmap: RoadMap, start: str, goal: str, *, recursive: bool = False,
                      options: ControlOptions | None = None) -> MapProgram:
    text = (recursive_hillclimb_text if recursive else hillclimb_text)(roadmap, start, goal)
    net = parse(text, "<hillclimb>")
    return MapProgram(
        net=net,
        options=options or preset_options("hill-climbing"),
        registry=map_registry(roadmap, goal),
        globals={"Visited": (start,), "Path": (start,), "Cost": 0},
        text=text,
    )
