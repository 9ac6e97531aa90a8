"""Game definitions: alphabets, position strings, move lists and end sets.

Positions are strings with one symbol per board square (or per heap for
Nim); symbol 0 is always "empty". The side to move is never part of the
string. Every set carries a :class:`Player` tag instead, and each player has
its own move list and terminal/win/loss sets.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

from .algebra import intersection, inverse, union_many
from .dfa import Alphabet, PositionSet, cube, empty_set, from_strings
from .errors import InvalidSymbolError, LengthMismatchError
from .moves import Change, MoveList, MoveSpec


class Player(enum.IntEnum):
    P1 = 1
    P2 = 2

    @property
    def opponent(self) -> "Player":
        return Player.P2 if self is Player.P1 else Player.P1

    @property
    def tag(self) -> str:
        return f"p{int(self)}"

    @classmethod
    def parse(cls, text: str) -> "Player":
        try:
            return {"p1": cls.P1, "p2": cls.P2}[text.strip().lower()]
        except KeyError:
            raise ValueError(f"side to move must be p1 or p2, got {text!r}") from None

    def at_ply(self, ply: int) -> "Player":
        """Side to move after ``ply`` moves when this player starts."""
        return self if ply % 2 == 0 else self.opponent


@dataclass(eq=False)
class GameDef:
    """Everything the set-based solver needs to know about a game."""

    name: str
    alphabet: Alphabet
    length: int
    moves: dict[Player, MoveList]
    terminal: dict[Player, PositionSet]
    win0: dict[Player, PositionSet]
    loss0: dict[Player, PositionSet]
    initial: tuple[int, ...]
    initial_player: Player = Player.P1
    max_ply: int | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        for p in Player:
            if not (self.win0[p] - self.terminal[p]).is_empty:
                raise ValueError(f"win0[{p.tag}] is not inside terminal[{p.tag}]")
            if not (self.loss0[p] - self.terminal[p]).is_empty:
                raise ValueError(f"loss0[{p.tag}] is not inside terminal[{p.tag}]")
            if not (self.win0[p] & self.loss0[p]).is_empty:
                raise ValueError(f"win0[{p.tag}] and loss0[{p.tag}] overlap")

    @property
    def impartial(self) -> bool:
        """Both players share moves and end sets (results may be shared too)."""
        p1, p2 = Player.P1, Player.P2
        return (
            self.moves[p1] is self.moves[p2]
            and self.terminal[p1] is self.terminal[p2]
            and self.win0[p1] is self.win0[p2]
            and self.loss0[p1] is self.loss0[p2]
        )

    def universe(self) -> PositionSet:
        return cube(self.alphabet, self.length)

    def empty(self) -> PositionSet:
        return empty_set(self.alphabet, self.length)

    def singleton(self, string: Sequence[int]) -> PositionSet:
        return from_strings(self.alphabet, self.length, [tuple(string)])

    def nonterminal(self, player: Player) -> PositionSet:
        return inverse(self.terminal[player])

    def description(self) -> dict:
        return {"name": self.name, **self.params}

    # Overridden by concrete games.
    def encode_board(self, board) -> tuple[int, ...]:
        raise NotImplementedError

    def decode_board(self, string: Sequence[int]):
        raise NotImplementedError

    def parse_position(self, text: str) -> tuple[tuple[int, ...], Player]:
        raise NotImplementedError

    def format_position(self, string: Sequence[int], player: Player) -> str:
        raise NotImplementedError


def _split_side(text):
    parts = text.split()
    if len(parts) != 2:
        raise ValueError(f"expected '<board> <p1|p2>', got {text!r}")
    return parts[0], Player.parse(parts[1])


class NimGame(GameDef):
    """Normal-play Nim; one symbol per heap holding its size."""

    @property
    def heaps(self) -> int:
        return self.params["heaps"]

    @property
    def sticks(self) -> int:
        return self.params["sticks"]

    def encode_board(self, board) -> tuple[int, ...]:
        board = tuple(int(h) for h in board)
        if len(board) != self.heaps:
            raise LengthMismatchError(f"expected {self.heaps} heaps, got {len(board)}")
        for h in board:
            if not 0 <= h <= self.sticks:
                raise InvalidSymbolError(f"heap size {h} outside 0..{self.sticks}")
        return board

    def decode_board(self, string):
        return self.encode_board(string)

    def parse_position(self, text):
        board, player = _split_side(text)
        try:
            heaps = [int(x) for x in board.split(",")]
        except ValueError:
            raise ValueError(f"bad heap list {board!r}") from None
        return self.encode_board(heaps), player

    def format_position(self, string, player):
        return ",".join(str(h) for h in string) + " " + player.tag


class BreakthroughGame(GameDef):
    """Breakthrough on a ``width`` x ``height`` board.

    Square ``(row, col)`` is string index ``row * width + col``. P1 starts on
    rows 0-1 and moves toward higher rows; P2 starts on the top two rows and
    moves down. A board is a tuple of row strings over ``. 1 2``, row 0
    first.
    """

    @property
    def width(self) -> int:
        return self.params["width"]

    @property
    def height(self) -> int:
        return self.params["height"]

    def square(self, row: int, col: int) -> int:
        if not (0 <= row < self.height and 0 <= col < self.width):
            raise IndexError(f"square ({row}, {col}) is off the board")
        return row * self.width + col

    def encode_board(self, board) -> tuple[int, ...]:
        rows = list(board)
        if len(rows) != self.height or any(len(r) != self.width for r in rows):
            raise LengthMismatchError(f"board must be {self.height} rows of {self.width} squares")
        return self.alphabet.parse("".join(rows))

    def decode_board(self, string):
        if len(string) != self.length:
            raise LengthMismatchError(f"string has length {len(string)}, expected {self.length}")
        text = self.alphabet.format(string)
        w = self.width
        return tuple(text[i:i + w] for i in range(0, self.length, w))

    def parse_position(self, text):
        board, player = _split_side(text)
        return self.encode_board(board.split("/")), player

    def format_position(self, string, player):
        return "/".join(self.decode_board(string)) + " " + player.tag


def game_description(name: str, **params) -> dict:
    """Validated ``{"name": ..., **params}`` without building any sets."""
    if name == "nim":
        heaps, sticks = params["heaps"], params["sticks"]
        if heaps < 1 or sticks < 1:
            raise ValueError("Nim needs at least one heap and one stick")
        return {"name": name, "heaps": heaps, "sticks": sticks}
    if name == "breakthrough":
        width, height = params["width"], params["height"]
        if width < 2 or height < 4:
            raise ValueError("Breakthrough needs width >= 2 and height >= 4")
        return {"name": name, "width": width, "height": height}
    raise ValueError(f"unknown game {name!r}")


def nim_game(heaps: int, sticks: int) -> NimGame:
    """Nim with ``heaps`` heaps of ``sticks`` sticks each (normal play)."""
    game_description("nim", heaps=heaps, sticks=sticks)
    alphabet = Alphabet(tuple(str(s) for s in range(sticks + 1)))
    universe = cube(alphabet, heaps)
    moves = []
    for h in range(heaps):
        for before in range(1, sticks + 1):
            pre = cube(alphabet, heaps, {h: [before]})
            for after in range(before):
                moves.append(
                    MoveSpec(pre, (Change(h, before, after),), universe, f"heap{h}:{before}->{after}")
                )
    shared = MoveList(moves)
    terminal = cube(alphabet, heaps, {h: [0] for h in range(heaps)})
    nothing = empty_set(alphabet, heaps)
    return NimGame(
        name="nim",
        alphabet=alphabet,
        length=heaps,
        moves={Player.P1: shared, Player.P2: shared},
        terminal={Player.P1: terminal, Player.P2: terminal},
        win0={Player.P1: nothing, Player.P2: nothing},
        loss0={Player.P1: terminal, Player.P2: terminal},
        initial=(sticks,) * heaps,
        max_ply=heaps * sticks,
        params={"heaps": heaps, "sticks": sticks},
    )


def breakthrough_game(width: int, height: int) -> BreakthroughGame:
    """Breakthrough with two rows of pawns per side."""
    game_description("breakthrough", width=width, height=height)
    alphabet = Alphabet((".", "1", "2"))
    length = width * height
    home = {Player.P1: 0, Player.P2: height - 1}
    step = {Player.P1: 1, Player.P2: -1}

    def sq(r, c):
        return r * width + c

    no_pieces = {
        p: cube(alphabet, length, {i: [s for s in range(3) if s != p] for i in range(length)})
        for p in Player
    }
    invaded = {
        p: union_many(
            cube(alphabet, length, {sq(home[p], c): [int(p.opponent)]}) for c in range(width)
        )
        for p in Player
    }
    terminal = {p: union_many([invaded[p], no_pieces[p], no_pieces[p.opponent]]) for p in Player}
    loss0 = {p: invaded[p] | no_pieces[p] for p in Player}
    win0 = {p: empty_set(alphabet, length) for p in Player}

    moves = {}
    for p in Player:
        guard = inverse(terminal[p])
        opp = int(p.opponent)
        specs = []
        for r in range(height):
            nr = r + step[p]
            if not 0 <= nr < height:
                continue
            for c in range(width):
                for dc in (-1, 0, 1):
                    nc = c + dc
                    if not 0 <= nc < width:
                        continue
                    targets = [0] if dc == 0 else [0, opp]
                    for dst_before in targets:
                        src, dst = sq(r, c), sq(nr, nc)
                        changes = sorted([Change(src, int(p), 0), Change(dst, dst_before, int(p))])
                        pre = intersection(
                            guard, cube(alphabet, length, {src: [int(p)], dst: [dst_before]})
                        )
                        label = f"{p.tag} {_square_name(r, c)}{'x' if dst_before else '-'}{_square_name(nr, nc)}"
                        specs.append(MoveSpec(pre, tuple(changes), cube(alphabet, length), label))
        moves[p] = MoveList(specs, guard=guard)

    initial = (1,) * (2 * width) + (0,) * (width * (height - 4)) + (2,) * (2 * width)
    # Each side can make w(2h-5) non-final pawn steps plus one final move.
    max_ply = 2 * width * (2 * height - 5) + 2
    return BreakthroughGame(
        name="breakthrough",
        alphabet=alphabet,
        length=length,
        moves=moves,
        terminal=terminal,
        win0=win0,
        loss0=loss0,
        initial=initial,
        max_ply=max_ply,
        params={"width": width, "height": height},
    )


def _square_name(row, col):
    return f"{chr(ord('a') + col)}{row + 1}"


def make_game(name: str, **params) -> GameDef:
    """Build a game by name: ``nim`` (heaps, sticks) or ``breakthrough`` (width, height)."""
    if name == "nim":
        return nim_game(params["heaps"], params["sticks"])
    if name == "breakthrough":
        return breakthrough_game(params["width"], params["height"])
    raise ValueError(f"unknown game {name!r}")
