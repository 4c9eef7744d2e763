"""Command-line front end.

Exit status: 0 when a solution was found, 1 when the search ran and found
none, 2 for usage, configuration, parse and runtime errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from .dsl import SourceProgram, parse
from .engine import ControlOptions, core_registry, execute
from .errors import CNError, ParseFailure
from .problems import (
    PRESETS,
    MapProblem,
    PuzzleProblem,
    hillclimb_program,
    load_costs,
    load_map,
    map_registry,
    parse_board,
    preset_options,
)
from .problems.puzzle import GOAL, Board, format_board
from .problems.tsp import AnnealSchedule, anneal
from .search import SearchOutcome, Strategy, generic_search
from .search_network import generic_search_registry, network_search

EXIT_OK, EXIT_FAILURE, EXIT_ERROR = 0, 1, 2
JSON_KEYS = ("result", "path", "cost", "stats", "strategy", "seed")


class UsageError(Exception):
    pass


# -- output -------------------------------------------------------------------

def show_state(state) -> str:
    if isinstance(state, tuple) and all(isinstance(t, int) for t in state):
        return format_board(state)
    return str(state)


def emit(outcome: dict, mode: str, out=None) -> None:
    """Write one result record. ``outcome`` carries the JSON fields by name."""
    out = out or sys.stdout
    record = {key: outcome.get(key) for key in JSON_KEYS}
    if mode == "json":
        out.write(json.dumps(record, indent=2) + "\n")
        return
    if record["result"] in ("failure", "invalid"):
        out.write("no solution\n" if record["result"] == "failure" else "invalid\n")
        return
    for state in record["path"]:
        out.write(f"{state}\n")
    if record["cost"] is not None:
        out.write(f"cost={_num(record['cost'])}\n")
    if record["stats"]:
        out.write(" ".join(f"{k}={_num(v)}" for k, v in record["stats"].items()) + "\n")


def _num(v):
    if isinstance(v, float) and v.is_integer():
        return int(v)
    return v


def _trace_sink(enabled: bool):
    if not enabled:
        return None
    return lambda line: print(line, file=sys.stderr)


# -- shared argument handling -------------------------------------------------

def _parse_strategy(name: str) -> Strategy:
    try:
        return Strategy.parse(name)
    except CNError as exc:
        raise UsageError(f"--strategy: {exc}") from None


def _flagged(flag, fn, *a):
    try:
        return fn(*a)
    except CNError as exc:
        raise UsageError(f"{flag}: {exc}") from None


def _problem(args):
    if args.problem == "map":
        roadmap = _flagged("--map", load_map, args.map)
        if args.goal is None or args.start is None:
            raise UsageError("--start and --goal are required for the map problem")
        problem = _flagged("--goal", MapProblem, roadmap, args.goal)
        return problem, _flagged("--start", problem.check_state, args.start)
    if args.problem == "puzzle":
        goal: Board = _flagged("--goal", parse_board, args.goal) if args.goal else GOAL
        problem = _flagged("--radius", PuzzleProblem, goal, args.radius)
        if args.start is None:
            raise UsageError("--start is required for the puzzle problem")
        board = _flagged("--start", parse_board, args.start)
        return problem, _flagged("--start", problem.check_state, board)
    raise UsageError(f"--problem: unknown problem {args.problem!r}")


def _options(args, base: ControlOptions) -> ControlOptions:
    if args.preset:
        base = preset_options(args.preset, width=args.width or 2, seed=args.seed or 0,
                              bound=args.range[1] if args.range else None, max_depth=args.max_depth)
    changes = {}
    if args.order is not None:
        changes["order"] = args.order
    if args.width is not None:
        changes["width"] = args.width
    if args.range is not None:
        changes["range"] = tuple(args.range)
    if args.backtracking is not None:
        changes["backtracking"] = args.backtracking
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.max_solutions is not None:
        changes["max_solutions"] = args.max_solutions
    if args.max_depth is not None:
        changes["max_depth"] = args.max_depth
    return base.replace(**changes)


def _global_value(text: str):
    name, sep, value = text.partition("=")
    if not sep or not name:
        raise UsageError(f"--global expects NAME=VALUE, got {text!r}")
    try:
        return name, int(value)
    except ValueError:
        return name, value


def _resolve_program(path: str) -> SourceProgram:
    candidate = Path(path)
    if candidate.is_file():
        return SourceProgram.from_path(candidate)
    bundled = resources.files("cnp").joinpath("programs", candidate.name)
    if bundled.is_file():
        return SourceProgram(bundled.read_text(encoding="utf-8"), f"programs/{candidate.name}")
    raise UsageError(f"program file not found: {path}")


# -- subcommands --------------------------------------------------------------

def cmd_search(args) -> dict:
    strategy = _parse_strategy(args.strategy)
    problem, start = _problem(args)
    trace = _trace_sink(args.trace)
    if args.via_network:
        outcome = network_search(problem, start, strategy, trace=trace)
    else:
        outcome = generic_search(problem, start, strategy, trace=trace)
    return _search_record(outcome, problem, strategy)


def _search_record(outcome: SearchOutcome, problem, strategy) -> dict:
    return {
        "result": outcome.result,
        "path": [problem.render(s) for s in outcome.path],
        "cost": outcome.cost,
        "stats": outcome.stats,
        "strategy": strategy.value,
        "seed": None,
    }


def cmd_run(args) -> dict:
    registry = core_registry()
    base = ControlOptions()
    globals_: dict = {}
    problem = None
    strategy = _parse_strategy(args.strategy) if args.strategy else None

    if args.hillclimb:
        if args.problem not in (None, "map"):
            raise UsageError("--hillclimb works on the map problem only")
        if args.start is None or args.goal is None:
            raise UsageError("--hillclimb needs --start and --goal")
        roadmap = load_map(args.map)
        program = hillclimb_program(roadmap, args.start, args.goal, recursive=args.hillclimb == "recursive")
        net, base, globals_ = program.net, program.options, dict(program.globals)
        registry = registry.merged(program.registry)
    else:
        if args.program is None:
            raise UsageError("run needs a PROGRAM path or --hillclimb")
        net = parse(_resolve_program(args.program))
        if args.problem is not None:
            problem, start = _problem(args)
            if strategy is not None:
                registry = registry.merged(generic_search_registry(problem, start, strategy))
            if args.problem == "map":
                registry = registry.merged(map_registry(problem.roadmap, problem.goal))
                globals_ = {"Visited": (start,), "Path": (start,), "Cost": 0}
        elif strategy is not None:
            raise UsageError("--strategy needs --problem")
    for item in args.globals or ():
        name, value = _global_value(item)
        globals_[name] = value

    opts = _options(args, base)
    run = execute(net, registry, opts, globals_, trace=_trace_sink(args.trace))
    stats = run.stats.as_dict()
    stats["solutions"] = len(run.solutions)
    label = strategy.value if strategy else args.preset
    if not run.success:
        return {"result": "failure", "path": [], "cost": None, "stats": stats, "strategy": label, "seed": opts.seed}
    solution = run.solutions[0]
    b = solution.bindings
    result = b.get("Result", "solution")
    if "Path" in b:
        path = [show_state(s) for s in b["Path"]]
        cost = b.get("Cost")
    else:
        path = [str(step) for step in solution.steps]
        cost = len(solution.steps)
    if result != "solution":
        path, cost = [], None
    return {"result": result, "path": path, "cost": cost, "stats": stats, "strategy": label, "seed": opts.seed}


def cmd_anneal(args) -> dict:
    costs = load_costs(args.costs)
    schedule = AnnealSchedule.default_for(costs, t0=args.t0, alpha=args.alpha, iterations=args.iterations,
                                          t_min=args.tmin)
    seed = args.seed if args.seed is not None else 0
    result = anneal(costs, schedule, seed, trace=_trace_sink(args.trace))
    stats = result.run.stats.as_dict()
    stats["steps"] = len(result.history) - 1
    return {
        "result": "solution",
        "path": list(result.tour) + [result.tour[0]],
        "cost": result.cost,
        "stats": stats,
        "strategy": "simulated-annealing",
        "seed": seed,
    }


def cmd_validate(args) -> dict:
    src = _resolve_program(args.program)
    try:
        net = parse(src)
    except ParseFailure as exc:
        return {"result": "invalid", "path": [], "cost": None,
                "stats": {"errors": [str(e) for e in exc.errors]}, "strategy": None, "seed": None}
    stats = {
        "subnets": len(net.subnets),
        "nodes": sum(len(s.nodes) for s in net.subnets),
        "arrows": sum(len(s.arrows) for s in net.subnets),
    }
    return {"result": "valid", "path": [], "cost": None, "stats": stats, "strategy": None, "seed": None}


# -- argument parser ----------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--output", choices=("text", "json"), default="text")
    p.add_argument("--trace", action="store_true", help="stream trace events to standard error")


def _add_problem(p: argparse.ArgumentParser, required: bool) -> None:
    p.add_argument("--problem", choices=("map", "puzzle"), required=required)
    p.add_argument("--start")
    p.add_argument("--goal")
    p.add_argument("--map", help="road map file (default: bundled A..H map)")
    p.add_argument("--radius", type=int, help="puzzle only: restrict to boards this many moves from the goal")


def _nonneg_seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cnp", description="Control network interpreter and search toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("search", help="run the generic search algorithm")
    p.add_argument("--strategy", required=True, help=", ".join(s.value for s in Strategy))
    _add_problem(p, required=True)
    p.add_argument("--via-network", action="store_true", help="run the search as the bundled control network")
    _add_common(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("run", help="execute a .cn program")
    p.add_argument("program", nargs="?")
    p.add_argument("--hillclimb", choices=("iterative", "recursive"), help="generate a hill-climbing program for the map")
    p.add_argument("--strategy", help="provide the generic search primitives for this strategy")
    _add_problem(p, required=False)
    p.add_argument("--preset", choices=PRESETS)
    p.add_argument("--order", choices=("declared", "best", "random"))
    p.add_argument("--width", type=int)
    p.add_argument("--range", type=float, nargs=2, metavar=("LOW", "HIGH"))
    p.add_argument("--backtracking", dest="backtracking", action="store_true", default=None)
    p.add_argument("--no-backtracking", dest="backtracking", action="store_false")
    p.add_argument("--seed", type=_nonneg_seed)
    p.add_argument("--max-solutions", type=int)
    p.add_argument("--max-depth", type=int)
    p.add_argument("--global", dest="globals", action="append", metavar="NAME=VALUE")
    _add_common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("anneal", help="simulated annealing on the four-city TSP")
    p.add_argument("--costs", help="cost file (default: bundled instance)")
    p.add_argument("--t0", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--iterations", type=int)
    p.add_argument("--tmin", type=float)
    p.add_argument("--seed", type=_nonneg_seed)
    _add_common(p)
    p.set_defaults(func=cmd_anneal)

    p = sub.add_parser("validate", help="parse and check a .cn program")
    p.add_argument("program")
    p.add_argument("--output", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_validate, trace=False)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        record = args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"cnp {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ParseFailure as exc:
        for err in exc.errors:
            print(err, file=sys.stderr)
        return EXIT_ERROR
    except (CNError, OSError) as exc:
        print(f"cnp {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.command == "validate":
        if args.output == "json":
            emit(record, "json")
        elif record["result"] == "valid":
            print(f"{args.program}: ok")
        else:
            for line in record["stats"]["errors"]:
                print(line, file=sys.stderr)
        return EXIT_OK if record["result"] == "valid" else EXIT_ERROR
    emit(record, args.output)
    return EXIT_OK if record["result"] == "solution" else EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
