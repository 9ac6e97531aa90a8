"""Explicit position-by-position rules and a brute-force game-value oracle.

Nothing here touches the DFA machinery: positions are plain ``bytes`` (one
symbol per square), moves are generated square by square, and values come
from a memoized depth-first minimax over every reachable position. The
oracle exists to check the set-based solver independently.
"""

from __future__ import annotations

import enum
from typing import Iterator

from .errors import BudgetExceededError, ContractError


class Value(str, enum.Enum):
    WIN = "WIN"
    LOSS = "LOSS"
    DRAW = "DRAW"


class NimRules:
    """Normal-play Nim; a position is the tuple of heap sizes."""

    def __init__(self, heaps, sticks):
        self.heaps = heaps
        self.sticks = sticks
        self.initial = bytes([sticks] * heaps)

    def end_value(self, pos: bytes, player: int):
        """``Value`` if the game is over for the side to move, else ``None``."""
        return Value.LOSS if not any(pos) else None

    def successors(self, pos: bytes, player: int) -> Iterator[bytes]:
        for h, size in enumerate(pos):
            for after in range(size):
                yield pos[:h] + bytes([after]) + pos[h + 1:]


class BreakthroughRules:
    """Breakthrough pawns: P1 (symbol 1) moves up the rows, P2 (symbol 2) down."""

    def __init__(self, width, height):
        self.width = width
        self.height = height
        w = width
        self.initial = bytes([1] * (2 * w) + [0] * (w * (height - 4)) + [2] * (2 * w))

    def end_value(self, pos: bytes, player: int):
        opp = 3 - player
        home = 0 if player == 1 else self.height - 1
        row = pos[home * self.width:(home + 1) * self.width]
        if opp in row or player not in pos:
            return Value.LOSS
        if opp not in pos:
            # unreachable with this side to move; treated as over
            return Value.WIN
        return None

    def successors(self, pos: bytes, player: int) -> Iterator[bytes]:
        w, h = self.width, self.height
        step = 1 if player == 1 else -1
        for i, piece in enumerate(pos):
            if piece != player:
                continue
            r, c = divmod(i, w)
            nr = r + step
            if not 0 <= nr < h:
                continue
            for dc in (-1, 0, 1):
                nc = c + dc
                if not 0 <= nc < w:
                    continue
                j = nr * w + nc
                target = pos[j]
                if dc == 0 and target != 0:
                    continue
                if dc != 0 and target == player:
                    continue
                board = bytearray(pos)
                board[i] = 0
                board[j] = player
                yield bytes(board)


def rules_for(game):
    """Explicit rules matching a :class:`~cgs.games.GameDef`'s parameters."""
    if game.name == "nim":
        return NimRules(game.params["heaps"], game.params["sticks"])
    if game.name == "breakthrough":
        return BreakthroughRules(game.params["width"], game.params["height"])
    raise ValueError(f"no explicit rules for {game.name!r}")


def reachable_by_ply(rules, initial_player=1, max_positions=10**7):
    """Explicit breadth-first ``R_i`` as sets of ``bytes``, ending with an empty set."""
    frontier = {rules.initial}
    player = initial_player
    out = [frontier]
    total = 1
    while frontier:
        nxt = set()
        for pos in frontier:
            if rules.end_value(pos, player) is not None:
                continue
            nxt.update(rules.successors(pos, player))
        total += len(nxt)
        if total > max_positions:
            raise BudgetExceededError(f"more than {max_positions} positions")
        out.append(nxt)
        frontier = nxt
        player = 3 - player
    return out


def brute_force_oracle(rules, initial_player=1, max_positions=10**7):
    """Game value for the side to move at every reachable ``(position, player)``.

    Positions with no legal move that are not over count as losses for the
    side to move. Raises :class:`BudgetExceededError` past ``max_positions``
    and :class:`ContractError` if the game graph has a cycle.
    """
    values = {}
    root = (rules.initial, initial_player)
    on_stack = set()
    # each frame: [node, successor iterator, best value so far, child being expanded]
    stack = []

    def push(node):
        if len(values) + len(on_stack) >= max_positions:
            raise BudgetExceededError(f"more than {max_positions} positions")
        pos, player = node
        end = rules.end_value(pos, player)
        if end is not None:
            values[node] = end
            return
        on_stack.add(node)
        stack.append([node, iter(rules.successors(pos, player)), Value.LOSS, None])

    def better(best, child_value):
        if child_value is Value.LOSS:
            return Value.WIN
        if child_value is Value.DRAW and best is Value.LOSS:
            return Value.DRAW
        return best

    push(root)
    while stack:
        frame = stack[-1]
        node, succ, _, pending = frame
        if pending is not None:
            frame[2] = better(frame[2], values[pending])
            frame[3] = None
        descended = False
        for child_pos in succ:
            child = (child_pos, 3 - node[1])
            if child in on_stack:
                raise ContractError("game graph has a cycle; the oracle needs an acyclic game")
            value = values.get(child)
            if value is None:
                push(child)
                if child not in values:
                    frame[3] = child
                    descended = True
                    break
                value = values[child]
            frame[2] = better(frame[2], value)
        if descended:
            continue
        stack.pop()
        on_stack.discard(node)
        values[node] = frame[2]
    return values
