"""Four-city travelling salesperson solved by simulated annealing.

The annealing run is a mixed program: a procedural temperature loop in the
main subnet around a declarative Monte Carlo step (``programs/tsp_anneal.cn``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Union

from ..dsl import SourceProgram, parse
from ..engine import ControlOptions, ExecutionResult, PrimitiveRegistry, execute
from ..errors import ConfigurationError
from ..network import ControlNetwork
from ..rng import SplitMix64

Tour = tuple[str, ...]

# acceptance draws use their own stream, derived from the run seed
_ACCEPT_STREAM = 0xD1B54A32D192ED03


@dataclass(frozen=True)
class Costs:
    cities: tuple[str, ...]
    table: dict[frozenset, float]

    def __post_init__(self):
        for i, u in enumerate(self.cities):
            for v in self.cities[i + 1:]:
                c = self.table.get(frozenset((u, v)))
                if c is None:
                    raise ConfigurationError(f"missing cost between {u} and {v}")
                if c <= 0:
                    raise ConfigurationError(f"cost between {u} and {v} must be positive")

    def __call__(self, u: str, v: str) -> float:
        return self.table[frozenset((u, v))]

    @property
    def max_cost(self) -> float:
        return max(self.table.values())


def parse_costs(text: str, origin: str = "<costs>") -> Costs:
    table: dict[frozenset, float] = {}
    cities: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        fields = raw.split("#", 1)[0].split()
        if not fields:
            continue
        if len(fields) != 3:
            raise ConfigurationError(f"{origin}:{lineno}: expected '<city> <city> <cost>'")
        u, v, c = fields
        if u == v:
            raise ConfigurationError(f"{origin}:{lineno}: cost from {u} to itself")
        try:
            cost = int(c)
        except ValueError:
            try:
                cost = float(c)
            except ValueError:
                raise ConfigurationError(f"{origin}:{lineno}: malformed cost {c!r}") from None
        table[frozenset((u, v))] = cost
        cities += [x for x in (u, v) if x not in cities]
    return Costs(tuple(sorted(cities)), table)


def load_costs(path: Union[str, Path, None] = None) -> Costs:
    if path is None:
        text = resources.files("cnp").joinpath("data/tsp4.txt").read_text(encoding="utf-8")
        return parse_costs(text, "tsp4.txt")
    return parse_costs(Path(path).read_text(encoding="utf-8"), str(path))


def tour_cost(tour: Tour, costs: Costs) -> float:
    return sum(costs(tour[i], tour[(i + 1) % len(tour)]) for i in range(len(tour)))


def two_opt(tour: Tour, i: int, j: int) -> Tour:
    """Reverse the segment ``tour[i..j]``; the start city stays in place for i >= 1."""
    if not 0 <= i < j < len(tour):
        raise ConfigurationError(f"bad 2-opt move ({i}, {j}) for a tour of {len(tour)} cities")
    return tour[:i] + tuple(reversed(tour[i:j + 1])) + tour[j + 1:]


def acceptance_probability(delta: float, temperature: float) -> float:
    if delta <= 0:
        return 1.0
    if temperature <= 0:
        return 0.0
    return math.exp(-delta / temperature)


@dataclass(frozen=True)
class AnnealSchedule:
    t0: float
    alpha: float = 0.9
    iterations: int = 20
    t_min: float = 0.01

    def __post_init__(self):
        if not self.t0 > 0:
            raise ConfigurationError(f"initial temperature must be positive, got {self.t0}")
        if not 0 < self.alpha < 1:
            raise ConfigurationError(f"cooling factor must lie strictly between 0 and 1, got {self.alpha}")
        if isinstance(self.iterations, bool) or not isinstance(self.iterations, int) or self.iterations < 1:
            raise ConfigurationError(f"iterations per temperature must be a positive integer, got {self.iterations}")
        if not self.t_min > 0:
            raise ConfigurationError(f"stop temperature must be positive, got {self.t_min}")

    @classmethod
    def default_for(cls, costs: Costs, **overrides) -> "AnnealSchedule":
        overrides = {k: v for k, v in overrides.items() if v is not None}
        overrides.setdefault("t0", 10 * costs.max_cost)
        return cls(**overrides)


@dataclass
class AnnealProgram:
    net: ControlNetwork
    registry: PrimitiveRegistry
    options: ControlOptions
    globals: dict


def tsp_registry(costs: Costs, schedule: AnnealSchedule, seed: int) -> PrimitiveRegistry:
    reg = PrimitiveRegistry()
    draws = SplitMix64(seed ^ _ACCEPT_STREAM)

    @reg.register()
    def initTour(env):
        tour = costs.cities
        c = tour_cost(tour, costs)
        return {"Tour": tour, "Best": tour, "BestCost": c, "History": (c,), "T": schedule.t0}

    @reg.register()
    def frozen(env):
        return env["T"] < schedule.t_min

    @reg.register()
    def resetSteps(env):
        return {"Steps": 0}

    @reg.register()
    def stepsDone(env):
        return env["Steps"] >= schedule.iterations

    @reg.register()
    def countStep(env):
        return {"Steps": env["Steps"] + 1}

    @reg.register()
    def cool(env):
        return {"T": env["T"] * schedule.alpha}

    @reg.register()
    def propose(env, i, j):
        return {"Candidate": two_opt(env["Tour"], i, j)}

    # the random draw is not undone by backtracking
    @reg.register(backtrackable=False)
    def accept(env):
        cand = env["Candidate"]
        new_cost = tour_cost(cand, costs)
        p = acceptance_probability(new_cost - tour_cost(env["Tour"], costs), env["T"])
        if p < 1 and draws.random() >= p:
            return False
        out = {"Tour": cand}
        best = env["BestCost"]
        if new_cost < best:
            out.update(Best=cand, BestCost=new_cost)
            best = new_cost
        out["History"] = env["History"] + (best,)
        return out

    @reg.register()
    def reject(env):
        return {"History": env["History"] + (env["BestCost"],)}

    return reg


def tsp_anneal_program(costs: Costs, schedule: AnnealSchedule | None = None, seed: int = 0) -> AnnealProgram:
    if len(costs.cities) != 4:
        raise ConfigurationError(f"the annealing program is written for 4 cities, got {len(costs.cities)}")
    schedule = schedule or AnnealSchedule.default_for(costs)
    text = resources.files("cnp").joinpath("programs/tsp_anneal.cn").read_text(encoding="utf-8")
    net = parse(SourceProgram(text, "programs/tsp_anneal.cn"))
    return AnnealProgram(net, tsp_registry(costs, schedule, seed), ControlOptions(seed=seed), {})


@dataclass
class AnnealResult:
    tour: Tour
    cost: float
    history: tuple
    run: ExecutionResult
    seed: int


def anneal(costs: Costs, schedule: AnnealSchedule | None = None, seed: int = 0, *, trace=None) -> AnnealResult:
    program = tsp_anneal_program(costs, schedule, seed)
    run = execute(program.net, program.registry, program.options, program.globals, trace=trace)
    b = run.solutions[0].bindings
    return AnnealResult(b["Best"], b["BestCost"], b["History"], run, seed)
