import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

CRITERIA = {
    1: "oracle optimality on the map (uniform-cost, a-star vs Dijkstra)",
    2: "hop optimality (breadth-first vs BFS oracle, map and puzzle <= 6 moves)",
    3: "strategy table and h=0 collapse of a-star to uniform-cost",
    4: "pushOpen five cases and exclusivity, 10,000 random cases",
    5: "engine exhaustiveness and trail soundness, 200 random networks",
    6: "non-procedural hill climbing (best-first attempts, greedy walk)",
    7: "bundled .cn search agrees with generic_search, all strategies",
    8: "annealing optimum, acceptance probability, monotone best",
    9: "byte-identical CLI output for 20 flag combinations",
}

_results: dict[int, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n = marker.args[0]
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _results.setdefault(n, []).append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n, text in CRITERIA.items():
        if n not in _results:
            continue
        verdict = "PASS" if all(_results[n]) else "FAIL"
        terminalreporter.write_line(f"ACCEPTANCE {n} {verdict}: {text}")
