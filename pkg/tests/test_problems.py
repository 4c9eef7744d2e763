import math

import pytest

import oracles
from cnp import ControlOptions, core_registry, execute
from cnp.errors import ConfigurationError, NetworkError
from cnp.problems import (
    AnnealSchedule,
    MapProblem,
    PuzzleProblem,
    acceptance_probability,
    anneal,
    hillclimb_program,
    load_costs,
    load_map,
    map_h,
    parse_board,
    parse_map,
    preset_options,
    puzzle_h,
    puzzle_successors,
    solvable,
    tour_cost,
    tsp_anneal_program,
    two_opt,
)
from cnp.problems.tsp import parse_costs
from cnp.search import Strategy, generic_search

ROADMAP = load_map()


# -- road map -----------------------------------------------------------------

def test_map_h_basics():
    for c in oracles.CITIES:
        assert map_h(ROADMAP, c, c) == 0
    for a, b in oracles.PAIRS:
        assert map_h(ROADMAP, a, b) == map_h(ROADMAP, b, a)
        (x1, y1), (x2, y2) = oracles.MAP_COORDS[a], oracles.MAP_COORDS[b]
        assert map_h(ROADMAP, a, b) == math.floor(math.hypot(x1 - x2, y1 - y2))


def test_map_h_is_consistent_edgewise():
    for goal in oracles.CITIES:
        for (u, v), cost in oracles.MAP_EDGES.items():
            assert map_h(ROADMAP, u, goal) <= cost + map_h(ROADMAP, v, goal)
            assert map_h(ROADMAP, v, goal) <= cost + map_h(ROADMAP, u, goal)


def test_map_h_is_admissible():
    for goal in oracles.CITIES:
        dist = oracles.dijkstra(goal)
        for c in oracles.CITIES:
            assert map_h(ROADMAP, c, goal) <= dist[c]


def test_unknown_city_is_a_lookup_error():
    with pytest.raises(LookupError):
        ROADMAP.neighbors("Z")
    with pytest.raises(NetworkError):
        map_h(ROADMAP, "A", "Z")
    with pytest.raises(NetworkError):
        MapProblem(ROADMAP, "Z")


def test_successors_are_symmetric():
    for a in oracles.CITIES:
        for b, cost in ROADMAP.neighbors(a):
            assert (a, cost) in ROADMAP.neighbors(b)


@pytest.mark.parametrize("text, message", [
    ("A 0 0\nB 3 4\nA B 4\n", "straight-line"),
    ("A 0 0\nB 3 4\nC 9 9\nA B 5\n", "not connected"),
    ("A 0 0\nB 3 4\nA B 0\n", "positive"),
    ("A 0 0\nA B 5\n", "no coordinates"),
    ("A 0 0 1\n", "three fields"),
    ("A 0 x\n", "malformed"),
    ("A 0 0\nA A 3\n", "itself"),
])
def test_bad_maps(text, message):
    with pytest.raises(ConfigurationError, match=message):
        parse_map(text)


def test_map_file_round_trip(tmp_path):
    path = tmp_path / "m.txt"
    path.write_text("# tiny\nP 0 0\nQ 3 4   # corner\nP Q 5\n", encoding="utf-8")
    roadmap = load_map(path)
    assert roadmap.cities == ("P", "Q") and roadmap.cost("Q", "P") == 5


# -- 8-puzzle -----------------------------------------------------------------

def test_puzzle_h_and_successors():
    assert puzzle_h(oracles.PUZZLE_GOAL) == 0
    assert len(puzzle_successors(oracles.PUZZLE_GOAL)) == 2
    assert len(puzzle_successors((0, 1, 2, 3, 4, 5, 6, 7, 8))) == 2
    assert len(puzzle_successors((1, 0, 2, 3, 4, 5, 6, 7, 8))) == 3
    assert len(puzzle_successors((1, 2, 3, 4, 0, 5, 6, 7, 8))) == 4
    for board in oracles.puzzle_ball(5):
        succ = puzzle_successors(board)
        assert sorted(b for b, _ in succ) == sorted(oracles.slide(board))
        assert all(c == 1 for _, c in succ)


def test_one_move_boards():
    pre_images = oracles.slide(oracles.PUZZLE_GOAL)
    assert len(pre_images) == 2
    for board in pre_images:
        assert puzzle_h(board) == 1
        out = generic_search(PuzzleProblem(), board, Strategy.A_STAR)
        assert out.stats["expansions"] == 1 and out.cost == 1


def test_puzzle_h_admissible_within_eight_moves():
    for board, depth in oracles.puzzle_ball(8).items():
        assert puzzle_h(board) <= depth


def test_layer_sizes_match_known_counts():
    from collections import Counter
    sizes = Counter(oracles.puzzle_ball(8).values())
    assert tuple(sizes[d] for d in range(9)) == oracles.PUZZLE_LAYER_SIZES


def test_solvability_parity():
    assert solvable(oracles.PUZZLE_GOAL)
    assert not solvable((1, 2, 3, 4, 5, 6, 8, 7, 0))
    assert all(solvable(b) for b in oracles.puzzle_ball(6))
    with pytest.raises(ConfigurationError, match="cannot reach"):
        PuzzleProblem().check_state((2, 1, 3, 4, 5, 6, 7, 8, 0))


@pytest.mark.parametrize("text", ["12345678", "1234567800", "123456789", "12345678a", "113456780"])
def test_bad_boards(text):
    with pytest.raises(ConfigurationError):
        parse_board(text)


def test_radius_limits_state_space():
    problem = PuzzleProblem(radius=3)
    far = next(b for b, d in oracles.puzzle_ball(4).items() if d == 4)
    with pytest.raises(ConfigurationError, match="more than 3"):
        problem.check_state(far)
    for board in oracles.puzzle_ball(3):
        assert all(oracles.puzzle_ball(3).get(b) is not None for b, _ in problem.successors(board))


# -- hill climbing ------------------------------------------------------------

def _run(program, **kw):
    return execute(program.net, core_registry().merged(program.registry), program.options, program.globals, **kw)


def _dfs(start, goal):
    """Chronological backtracking over roads in alphabetical order, no revisits."""
    def go(path):
        if path[-1] == goal:
            return path
        for nxt in sorted(oracles.map_neighbours(path[-1])):
            if nxt not in path:
                found = go(path + [nxt])
                if found:
                    return found
        return None
    return go([start])


@pytest.mark.parametrize("recursive", [False, True])
def test_declared_order_is_plain_backtracking(recursive):
    for start, goal in oracles.PAIRS:
        program = hillclimb_program(ROADMAP, start, goal, recursive=recursive,
                                    options=preset_options("backtracking"))
        result = _run(program)
        assert list(result.solutions[0].bindings["Path"]) == _dfs(start, goal), (start, goal)


def test_recursive_hill_climbing_agrees_with_iterative():
    for start, goal in oracles.PAIRS:
        for preset in ("hill-climbing", "irrevocable", "beam"):
            runs = [_run(hillclimb_program(ROADMAP, start, goal, recursive=r, options=preset_options(preset)))
                    for r in (False, True)]
            assert runs[0].success == runs[1].success, (start, goal, preset)
            if runs[0].success:
                assert runs[0].solutions[0].bindings["Path"] == runs[1].solutions[0].bindings["Path"]


def test_recursive_dead_end_fails_irrevocably():
    program = hillclimb_program(ROADMAP, "C", "H", recursive=True, options=preset_options("irrevocable"))
    assert not _run(program).success
    program = hillclimb_program(ROADMAP, "C", "H", recursive=True)
    result = _run(program, check_trail=True)
    assert list(result.solutions[0].bindings["Path"]) == ["C", "E", "H"]


def test_backtracking_hill_climbing_always_reaches_goal():
    for start, goal in oracles.PAIRS:
        result = _run(hillclimb_program(ROADMAP, start, goal), check_trail=True)
        path = list(result.solutions[0].bindings["Path"])
        assert path[0] == start and path[-1] == goal and oracles.is_path(path)
        assert result.solutions[0].bindings["Cost"] == oracles.path_cost(path)


def test_stochastic_presets_are_seeded():
    for preset in ("stochastic", "first-choice"):
        for seed in (0, 1, 99):
            opts = preset_options(preset, seed=seed)
            a = _run(hillclimb_program(ROADMAP, "A", "H", options=opts))
            b = _run(hillclimb_program(ROADMAP, "A", "H", options=opts))
            assert a == b
    paths = {tuple(_run(hillclimb_program(ROADMAP, "A", "H", options=preset_options("stochastic", seed=s)))
                   .solutions[0].bindings["Path"]) for s in range(20)}
    assert len(paths) > 1


def test_bounded_preset():
    with pytest.raises(ConfigurationError, match="bound"):
        preset_options("bounded")
    opts = preset_options("bounded", bound=11, max_depth=4)
    result = _run(hillclimb_program(ROADMAP, "A", "H", options=opts))
    path = result.solutions[0].bindings["Path"]
    assert all(map_h(ROADMAP, c, "H") <= 11 for c in path[1:])
    assert len(result.solutions[0]) <= 4
    with pytest.raises(ConfigurationError, match="unknown preset"):
        preset_options("simulated")


def test_beam_width_limits_attempts():
    lines = []
    _run(hillclimb_program(ROADMAP, "B", "H", options=preset_options("beam", width=2)), trace=lines.append)
    targets_from_b = {ln.split("->")[1] for ln in lines if ln.startswith("TRY") and " B->" in ln}
    assert targets_from_b <= {"E", "D"}


# -- TSP ----------------------------------------------------------------------

def test_costs_and_tours():
    costs = load_costs()
    assert costs.cities == ("A", "B", "C", "D") and costs.max_cost == 35
    for tour in oracles.tours():
        assert tour_cost(tour, costs) == oracles.tour_length(tour)
    assert two_opt(("A", "B", "C", "D"), 1, 2) == ("A", "C", "B", "D")
    assert two_opt(("A", "B", "C", "D"), 2, 3) == ("A", "B", "D", "C")
    with pytest.raises(ConfigurationError):
        two_opt(("A", "B", "C", "D"), 2, 2)


def test_two_opt_moves_reach_every_tour():
    def canon(t):
        return min(t[1:], t[:0:-1])
    seen, todo = {canon(("A", "B", "C", "D"))}, [("A", "B", "C", "D")]
    while todo:
        t = todo.pop()
        for i, j in ((1, 2), (2, 3)):
            n = two_opt(t, i, j)
            if canon(n) not in seen:
                seen.add(canon(n))
                todo.append(n)
    assert seen == {canon(t) for t in oracles.tours()}


def test_acceptance_probability_limits():
    assert acceptance_probability(-3, 0.5) == 1.0
    assert acceptance_probability(0, 1e-12) == 1.0
    assert acceptance_probability(10, 1e-6) == 0.0
    assert acceptance_probability(10, 0) == 0.0


@pytest.mark.parametrize("kw", [
    {"t0": 0}, {"t0": 10, "alpha": 1}, {"t0": 10, "alpha": 0}, {"t0": 10, "iterations": 0},
    {"t0": 10, "t_min": 0}, {"t0": -1},
])
def test_invalid_schedules(kw):
    with pytest.raises(ConfigurationError):
        AnnealSchedule(**kw)


def test_default_schedule():
    s = AnnealSchedule.default_for(load_costs())
    assert (s.t0, s.alpha, s.iterations, s.t_min) == (350, 0.9, 20, 0.01)
    assert AnnealSchedule.default_for(load_costs(), alpha=0.5).alpha == 0.5


def test_zero_temperature_never_accepts_worse(tmp_path):
    # with a tiny start temperature only improving moves are taken
    costs = load_costs()
    result = anneal(costs, AnnealSchedule(t0=1e-9, t_min=1e-10, iterations=30), seed=3)
    assert result.cost == min(result.history)


def test_annealing_program_is_mixed():
    program = tsp_anneal_program(load_costs())
    assert [s.name for s in program.net.subnets] == ["Main", "MonteCarloStep"]
    with pytest.raises(ConfigurationError, match="4 cities"):
        tsp_anneal_program(parse_costs("A B 1\nA C 1\nB C 1\n"))


def test_annealing_is_deterministic_per_seed():
    costs = load_costs()
    a, b = anneal(costs, seed=7), anneal(costs, seed=7)
    assert (a.tour, a.cost, a.history, a.run.stats) == (b.tour, b.cost, b.history, b.run.stats)
    assert len(a.history) == 1 + 20 * math.ceil(math.log(0.01 / 350) / math.log(0.9))


@pytest.mark.parametrize("text", ["A B 10\nA C\n", "A A 3\n", "A B x\n", "A B 1\nA C 1\n"])
def test_bad_cost_files(text):
    with pytest.raises(ConfigurationError):
        parse_costs(text)
