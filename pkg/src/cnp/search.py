"""One search loop for breadth-first, depth-first, uniform-cost, best-first and A*.

Every strategy runs the same skeleton: pop the first OPEN entry, stop if it
is final, otherwise move it to CLOSED, generate its children, merge them
into OPEN and re-sort OPEN. The strategy only decides two things: how a
child's ``g`` grows (:func:`child_g`) and which key OPEN is sorted by
(:func:`total_f`).

Ties in the sort keep insertion order, so equal-``f`` entries leave OPEN
first-in first-out. For depth-first that gives the "leap frogging" variant,
deepest entry first with FIFO among siblings, which is not the same as
chronological backtracking.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Optional, Protocol

from .errors import ConfigurationError, InternalConsistencyError

Trace = Optional[Callable[[str], None]]


class Strategy(str, enum.Enum):
    A_STAR = "a-star"
    BEST_FIRST = "best-first"
    UNIFORM_COST = "uniform-cost"
    BREADTH_FIRST = "breadth-first"
    DEPTH_FIRST = "depth-first"

    @classmethod
    def parse(cls, name: str) -> "Strategy":
        try:
            return cls(name.lower())
        except ValueError:
            valid = ", ".join(s.value for s in cls)
            raise ConfigurationError(f"unknown strategy {name!r}; choose one of: {valid}") from None


class Problem(Protocol):
    def successors(self, state) -> Iterable[tuple[Any, float]]: ...
    def h(self, state) -> float: ...
    def is_final(self, state) -> bool: ...
    def render(self, state) -> str: ...


@dataclass(frozen=True)
class CompleteState:
    state: Hashable
    g: float
    h: float
    parent: Optional[Hashable] = None


class Frontier:
    """OPEN: an ordered sequence holding at most one entry per state."""

    def __init__(self, entries: Iterable[CompleteState] = ()):
        self.entries: list[CompleteState] = []
        self._by_state: dict[Hashable, CompleteState] = {}
        for entry in entries:
            self.append(entry)

    def __len__(self) -> int:
        return len(self.entries)

    def __bool__(self) -> bool:
        return bool(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __contains__(self, state) -> bool:
        return state in self._by_state

    def get(self, state) -> Optional[CompleteState]:
        return self._by_state.get(state)

    def append(self, entry: CompleteState) -> None:
        if entry.state in self._by_state:
            raise InternalConsistencyError(f"state {entry.state!r} is already in OPEN")
        self.entries.append(entry)
        self._by_state[entry.state] = entry

    def replace(self, entry: CompleteState) -> None:
        old = self._by_state[entry.state]
        self.entries[self.entries.index(old)] = entry
        self._by_state[entry.state] = entry

    def pop_first(self) -> CompleteState:
        entry = self.entries.pop(0)
        del self._by_state[entry.state]
        return entry

    def copy(self) -> "Frontier":
        return Frontier(self.entries)

    def states(self) -> list:
        return [e.state for e in self.entries]


class ClosedSet(dict):
    """CLOSED: expanded complete states keyed by their state."""

    def add(self, entry: CompleteState) -> None:
        self[entry.state] = entry

    def copy(self) -> "ClosedSet":
        return ClosedSet(self)


@dataclass
class SearchOutcome:
    result: str
    path: list
    cost: Optional[float]
    stats: dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.result == "solution"


# -- the two strategy-dependent hooks ----------------------------------------

def total_f(strategy: Strategy, t: CompleteState) -> float:
    if strategy is Strategy.A_STAR:
        return t.g + t.h
    if strategy is Strategy.BEST_FIRST:
        return t.h
    if strategy in (Strategy.UNIFORM_COST, Strategy.BREADTH_FIRST):
        return t.g
    return -t.g


def child_g(strategy: Strategy, parent_g: float, arc_cost: float) -> float:
    if strategy in (Strategy.A_STAR, Strategy.UNIFORM_COST):
        return parent_g + arc_cost
    return parent_g + 1


# -- skeleton operations ----------------------------------------------------

def make_init_entry(start, problem: Problem) -> CompleteState:
    return CompleteState(start, 0, problem.h(start), None)


def pop_open(open_: Frontier) -> tuple[CompleteState, Frontier]:
    if not open_:
        raise InternalConsistencyError("pop from an empty OPEN")
    head = open_.pop_first()
    return head, open_


def find_children(s: CompleteState, problem: Problem, strategy: Strategy) -> list[CompleteState]:
    return [
        CompleteState(child, child_g(strategy, s.g, cost), problem.h(child), s.state)
        for child, cost in problem.successors(s.state)
    ]


def push_open(
    children: Iterable[CompleteState],
    open_: Frontier,
    closed: ClosedSet,
    trace: Trace = None,
) -> tuple[Frontier, ClosedSet]:
    """Merge children into OPEN, reopening CLOSED states reached more cheaply.

    Works in place and returns both containers for convenience.
    """
    for child in children:
        state = child.state
        if state in closed:
            if child.g < closed[state].g:
                del closed[state]
                if trace:
                    trace(f"REOPEN {_show(state)} g={child.g}")
                # keeps one entry per state if OPEN also holds it
                _merge_open(child, open_, trace)
            elif trace:
                trace(f"DROP {_show(state)} g={child.g}")
            continue
        _merge_open(child, open_, trace)
    return open_, closed


def _merge_open(child: CompleteState, open_: Frontier, trace: Trace) -> None:
    existing = open_.get(child.state)
    if existing is None:
        open_.append(child)
        if trace:
            trace(f"PUSH {_show(child.state)} g={child.g}")
    elif child.g < existing.g:
        open_.replace(child)
        if trace:
            trace(f"PUSH {_show(child.state)} g={child.g} replaces g={existing.g}")
    elif trace:
        trace(f"DROP {_show(child.state)} g={child.g}")


def sort_open(open_: Frontier, strategy: Strategy) -> Frontier:
    open_.entries.sort(key=lambda t: total_f(strategy, t))
    return open_


def reconstruct_path(closed: ClosedSet, final_entry: CompleteState, open_: Frontier | None = None) -> list:
    """Follow parent links from ``final_entry`` back to the initial entry.

    Links are looked up in CLOSED. A parent that was reopened after its
    children were expanded lives in OPEN instead, so ``open_`` is consulted
    as a fallback when given.
    """
    path = [final_entry.state]
    seen = {final_entry.state}
    parent = final_entry.parent
    while parent is not None:
        entry = closed.get(parent)
        if entry is None and open_ is not None:
            entry = open_.get(parent)
        if entry is None:
            raise InternalConsistencyError(f"parent {parent!r} of {path[-1]!r} is missing from CLOSED")
        if entry.state in seen:
            raise InternalConsistencyError(f"parent links loop at {entry.state!r}")
        seen.add(entry.state)
        path.append(entry.state)
        parent = entry.parent
    path.reverse()
    return path


def choose_strategy(name: str, start, goal) -> tuple[Strategy, Any, Any]:
    return Strategy.parse(name), start, goal


def generic_search(problem: Problem, start, strategy: Strategy, *, trace: Trace = None) -> SearchOutcome:
    open_ = Frontier([make_init_entry(start, problem)])
    closed = ClosedSet()
    expansions = 0
    max_open = 1
    while open_:
        s, open_ = pop_open(open_)
        if trace:
            trace(f"EXPAND {_show(s.state)} g={s.g} h={s.h} f={total_f(strategy, s)}")
        if problem.is_final(s.state):
            path = reconstruct_path(closed, s, open_)
            if trace:
                trace(f"SOLUTION length={len(path)} cost={s.g}")
            return SearchOutcome("solution", path, s.g, {"expansions": expansions, "max_open": max_open})
        closed.add(s)
        expansions += 1
        children = find_children(s, problem, strategy)
        open_, closed = push_open(children, open_, closed, trace)
        open_ = sort_open(open_, strategy)
        max_open = max(max_open, len(open_))
    if trace:
        trace("FAILURE")
    return SearchOutcome("failure", [], None, {"expansions": expansions, "max_open": max_open})


def _show(state) -> str:
    if isinstance(state, tuple):
        return "".join(map(str, state))
    return str(state)
