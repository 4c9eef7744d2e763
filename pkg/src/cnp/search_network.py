"""The generic search loop written as a control network.

``programs/generic_search.cn`` lays the loop out as nodes and arrows; the
registry built here supplies its primitives, each a thin wrapper over the
functions in :mod:`cnp.search`. Containers held in the environment are
copied before every change so backtracking can restore them.
"""

from __future__ import annotations

from importlib import resources

from .dsl import SourceProgram, parse
from .engine import ControlOptions, ExecutionResult, PrimitiveRegistry, execute
from .network import ControlNetwork
from .search import (
    ClosedSet,
    Frontier,
    Problem,
    SearchOutcome,
    Strategy,
    find_children,
    make_init_entry,
    pop_open,
    push_open,
    reconstruct_path,
    sort_open,
)

PROGRAM = "generic_search.cn"


def program_text(name: str) -> str:
    return resources.files("cnp").joinpath("programs", name).read_text(encoding="utf-8")


def generic_search_network() -> ControlNetwork:
    return parse(SourceProgram(program_text(PROGRAM), f"programs/{PROGRAM}"))


def generic_search_registry(problem: Problem, start, strategy: Strategy) -> PrimitiveRegistry:
    reg = PrimitiveRegistry()

    @reg.register()
    def makeInitEntry(env):
        return {"OPEN": Frontier([make_init_entry(start, problem)]), "CLOSED": ClosedSet(),
                "Expansions": 0, "MaxOpen": 1}

    @reg.register()
    def openEmpty(env):
        return not env["OPEN"]

    @reg.register()
    def popOpen(env):
        s, rest = pop_open(env["OPEN"].copy())
        return {"S": s, "OPEN": rest}

    @reg.register()
    def isFinal(env):
        return problem.is_final(env["S"].state)

    @reg.register()
    def pushClosed(env):
        closed = env["CLOSED"].copy()
        closed.add(env["S"])
        return {"CLOSED": closed, "Expansions": env["Expansions"] + 1}

    @reg.register()
    def findChildren(env):
        return {"Children": tuple(find_children(env["S"], problem, strategy))}

    @reg.register()
    def pushOpen(env):
        open_, closed = push_open(env["Children"], env["OPEN"].copy(), env["CLOSED"].copy())
        return {"OPEN": open_, "CLOSED": closed}

    @reg.register()
    def sortOpen(env):
        open_ = sort_open(env["OPEN"].copy(), strategy)
        return {"OPEN": open_, "MaxOpen": max(env["MaxOpen"], len(open_))}

    @reg.register()
    def reportSolution(env):
        s = env["S"]
        return {"Result": "solution", "Path": tuple(reconstruct_path(env["CLOSED"], s, env["OPEN"])), "Cost": s.g}

    @reg.register()
    def reportFailure(env):
        return {"Result": "failure", "Path": (), "Cost": None}

    return reg


def outcome_from_run(run: ExecutionResult) -> SearchOutcome:
    """Read the search result the network left in its globals."""
    if not run.success:
        return SearchOutcome("failure", [], None, {})
    b = run.solutions[0].bindings
    stats = {"expansions": b["Expansions"], "max_open": b["MaxOpen"]}
    return SearchOutcome(b["Result"], list(b["Path"]), b["Cost"], stats)


def network_search(problem: Problem, start, strategy: Strategy, *, trace=None) -> SearchOutcome:
    """Run the generic search through the interpreter instead of directly."""
    run = execute(generic_search_network(), generic_search_registry(problem, start, strategy),
                  ControlOptions(), trace=trace)
    return outcome_from_run(run)
