"""The 8-puzzle on a 3x3 board; boards are 9-tuples in row-major order, 0 is the blank."""

from __future__ import annotations

from collections import deque
from typing import Optional

from ..errors import ConfigurationError

Board = tuple[int, ...]

GOAL: Board = (1, 2, 3, 4, 5, 6, 7, 8, 0)

# blank moves in this order: up, down, left, right
_MOVES = ((-1, 0), (1, 0), (0, -1), (0, 1))


def parse_board(text: str) -> Board:
    text = text.strip()
    if len(text) != 9 or not text.isdigit() or sorted(text) != list("012345678"):
        raise ConfigurationError(f"board must be the nine digits 0-8 in some order, got {text!r}")
    return tuple(int(ch) for ch in text)


def format_board(board: Board) -> str:
    return "".join(map(str, board))


def inversions(board: Board) -> int:
    tiles = [t for t in board if t]
    return sum(1 for i in range(len(tiles)) for j in range(i + 1, len(tiles)) if tiles[i] > tiles[j])


def solvable(board: Board, goal: Board = GOAL) -> bool:
    """On a 3-wide board a move never changes inversion parity."""
    return inversions(board) % 2 == inversions(goal) % 2


def puzzle_successors(board: Board) -> list[tuple[Board, int]]:
    blank = board.index(0)
    row, col = divmod(blank, 3)
    out = []
    for dr, dc in _MOVES:
        r, c = row + dr, col + dc
        if 0 <= r < 3 and 0 <= c < 3:
            swap = r * 3 + c
            cells = list(board)
            cells[blank], cells[swap] = cells[swap], 0
            out.append((tuple(cells), 1))
    return out


def puzzle_h(board: Board, goal: Board = GOAL) -> int:
    """Sum over tiles 1..8 of the Manhattan distance to the tile's goal cell."""
    where = {tile: divmod(i, 3) for i, tile in enumerate(goal)}
    total = 0
    for i, tile in enumerate(board):
        if tile:
            r, c = divmod(i, 3)
            gr, gc = where[tile]
            total += abs(r - gr) + abs(c - gc)
    return total


def ball(goal: Board, radius: int) -> set[Board]:
    """Boards reachable from ``goal`` in at most ``radius`` moves."""
    seen = {goal}
    frontier = deque([(goal, 0)])
    while frontier:
        board, depth = frontier.popleft()
        if depth == radius:
            continue
        for nxt, _ in puzzle_successors(board):
            if nxt not in seen:
                seen.add(nxt)
                frontier.append((nxt, depth + 1))
    return seen


class PuzzleProblem:
    """Sliding-tile search towards ``goal``.

    With ``radius`` set, the state space is cut down to boards within that
    many moves of the goal, which keeps depth-first search finite and fast.
    """

    def __init__(self, goal: Board = GOAL, radius: Optional[int] = None):
        self.goal = tuple(goal)
        self.radius = radius
        self._allowed = ball(self.goal, radius) if radius is not None else None

    def successors(self, board):
        moves = puzzle_successors(board)
        if self._allowed is not None:
            moves = [(b, c) for b, c in moves if b in self._allowed]
        return moves

    def h(self, board) -> int:
        return puzzle_h(board, self.goal)

    def is_final(self, board) -> bool:
        return board == self.goal

    def render(self, board) -> str:
        return format_board(board)

    def check_state(self, board) -> Board:
        if not solvable(board, self.goal):
            raise ConfigurationError(f"board {format_board(board)} cannot reach {format_board(self.goal)}")
        if self._allowed is not None and board not in self._allowed:
            raise ConfigurationError(f"board {format_board(board)} is more than {self.radius} moves from the goal")
        return board
