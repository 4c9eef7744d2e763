"""Road map problem: cities with coordinates and weighted two-way roads."""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Union

from ..errors import ConfigurationError, NetworkError


@dataclass(frozen=True)
class RoadMap:
    cities: tuple[str, ...]
    coords: dict[str, tuple[int, int]]
    edges: dict[frozenset, int]

    def __post_init__(self):
        for city in self.cities:
            if city not in self.coords:
                raise ConfigurationError(f"city {city} has no coordinates")
        for pair, cost in self.edges.items():
            if cost <= 0:
                raise ConfigurationError(f"road {'-'.join(sorted(pair))} must have a positive cost")
            u, v = sorted(pair)
            if cost < math.dist(self.coords[u], self.coords[v]):
                raise ConfigurationError(
                    f"road {u}-{v} costs {cost}, less than the straight-line distance; the heuristic would overestimate")
        if not self.is_connected():
            raise ConfigurationError("road map is not connected")

    def neighbors(self, city: str) -> list[tuple[str, int]]:
        if city not in self.coords:
            raise NetworkError(f"unknown city {city!r}")
        out = []
        for other in self.cities:
            cost = self.edges.get(frozenset((city, other)))
            if cost is not None and other != city:
                out.append((other, cost))
        return out

    def cost(self, u: str, v: str) -> int:
        try:
            return self.edges[frozenset((u, v))]
        except KeyError:
            raise NetworkError(f"no road between {u} and {v}") from None

    def is_connected(self) -> bool:
        if not self.cities:
            return True
        seen, todo = {self.cities[0]}, [self.cities[0]]
        while todo:
            for nxt, _ in self.neighbors(todo.pop()):
                if nxt not in seen:
                    seen.add(nxt)
                    todo.append(nxt)
        return len(seen) == len(self.cities)

    def roads(self) -> list[tuple[str, str, int]]:
        """Directed roads in a stable order: by source city, then target city."""
        return [(u, v, c) for u in self.cities for v, c in self.neighbors(u)]


def parse_map(text: str, origin: str = "<map>") -> RoadMap:
    """Read ``A B 7`` road lines and ``A 0 4`` coordinate lines; ``#`` starts a comment."""
    coords: dict[str, tuple[int, int]] = {}
    edges: dict[frozenset, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        if len(line) != 3:
            raise ConfigurationError(f"{origin}:{lineno}: expected three fields, got {len(line)}")
        a, b, c = line
        if not _is_int(c):
            raise ConfigurationError(f"{origin}:{lineno}: malformed number in {raw.strip()!r}")
        if _is_int(b):
            coords[a] = (int(b), int(c))
        elif a == b:
            raise ConfigurationError(f"{origin}:{lineno}: road from {a} to itself")
        else:
            edges[frozenset((a, b))] = int(c)
    for pair in edges:
        for city in pair:
            if city not in coords:
                raise ConfigurationError(f"{origin}: city {city} appears in a road but has no coordinates")
    return RoadMap(tuple(sorted(coords)), coords, edges)


def _is_int(token: str) -> bool:
    return token.lstrip("-").isdigit()


def load_map(path: Union[str, Path, None] = None) -> RoadMap:
    if path is None:
        text = resources.files("cnp").joinpath("data/roadmap.txt").read_text(encoding="utf-8")
        return parse_map(text, "roadmap.txt")
    return parse_map(Path(path).read_text(encoding="utf-8"), str(path))


def map_successors(roadmap: RoadMap, city: str) -> list[tuple[str, int]]:
    return roadmap.neighbors(city)


def map_h(roadmap: RoadMap, city: str, goal: str) -> int:
    """Straight-line distance rounded down, which keeps it integral and admissible."""
    for c in (city, goal):
        if c not in roadmap.coords:
            raise NetworkError(f"unknown city {c!r}")
    (x1, y1), (x2, y2) = roadmap.coords[city], roadmap.coords[goal]
    return math.isqrt((x1 - x2) ** 2 + (y1 - y2) ** 2)


class MapProblem:
    """Route finding from any city to ``goal``."""

    def __init__(self, roadmap: RoadMap, goal: str):
        if goal not in roadmap.coords:
            raise NetworkError(f"unknown city {goal!r}")
        self.roadmap = roadmap
        self.goal = goal

    def successors(self, city):
        return map_successors(self.roadmap, city)

    def h(self, city) -> int:
        return map_h(self.roadmap, city, self.goal)

    def is_final(self, city) -> bool:
        return city == self.goal

    def render(self, city) -> str:
        return city

    def check_state(self, city) -> str:
        if city not in self.roadmap.coords:
            raise NetworkError(f"unknown city {city!r}")
        return city
