"""Moves as ``<pre, changes, post>`` triples and set-level move generation.

``forward(S)`` is the union over moves of ``change(S & pre) & post`` and
``reverse(S)`` the union of ``change^-1(S & post) & pre``. The change
operation rewrites a DFA whose changed depths read a single symbol: that
symbol's transition is moved to the new symbol, one layer at a time.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from . import telemetry
from .algebra import intersection, union_many
from .dfa import PositionSet, _from_raw, count, cube, empty_set, restrict
from .errors import ContractError


class Change(NamedTuple):
    index: int
    before: int
    after: int

    def swapped(self) -> "Change":
        return Change(self.index, self.after, self.before)


def _changes_tuple(changes):
    out = tuple(Change(*c) for c in changes)
    indices = [c.index for c in out]
    if any(a >= b for a, b in zip(indices, indices[1:])):
        raise ContractError(f"change indices must be strictly increasing: {indices}")
    return out


def apply_changes(s: PositionSet, changes: Sequence[Change]) -> PositionSet:
    """Rewrite ``before -> after`` at each changed index.

    Every state at a changed depth must have its only live transition on the
    ``before`` symbol, i.e. ``s`` is already restricted to the move's
    precondition. The raw rewrite keeps every state; canonicalization
    afterwards only renumbers.
    """
    changes = _changes_tuple(changes)
    telemetry.bump("set_ops")
    telemetry.bump("changes")
    if s.is_empty or not changes:
        return s
    layers = list(s.layers)
    for ch in changes:
        if not 0 <= ch.index < s.length:
            raise ContractError(f"change index {ch.index} outside 0..{s.length - 1}")
        if not (0 <= ch.before < s.k and 0 <= ch.after < s.k):
            raise ContractError(f"change {ch} uses a symbol outside the alphabet")
        layer = layers[ch.index]
        others = np.delete(layer, ch.before, axis=1)
        if others.any():
            raise ContractError(
                f"depth {ch.index} has live transitions on symbols other than {ch.before}"
            )
        if ch.before == ch.after:
            continue
        rewritten = np.zeros_like(layer)
        rewritten[:, ch.after] = layer[:, ch.before]
        layers[ch.index] = rewritten
    raw_states = sum(layer.shape[0] for layer in layers)
    result = _from_raw(s.alphabet, layers, s.initial)
    if raw_states != sum(layer.shape[0] for layer in s.layers):
        telemetry.bump("change_violations")
        raise ContractError("raw change rewrite altered the table size")
    if result.num_states() > s.num_states():
        telemetry.bump("change_violations")
        raise ContractError("change increased the number of states")
    if telemetry.strict_checks:
        telemetry.bump("change_checks")
        if count(result) != count(s):
            telemetry.bump("change_violations")
            raise ContractError("change did not preserve the number of positions")
    return result


def apply_changes_reverse(s: PositionSet, changes: Sequence[Change]) -> PositionSet:
    return apply_changes(s, [c.swapped() for c in _changes_tuple(changes)])


@dataclass(frozen=True, eq=False)
class MoveSpec:
    """One move: required set, symbol rewrites, and guaranteed set."""

    pre: PositionSet
    changes: tuple[Change, ...]
    post: PositionSet
    label: str = ""
    before_cube: PositionSet = field(init=False, repr=False)
    after_cube: PositionSet = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "changes", _changes_tuple(self.changes))
        alphabet, length = self.pre.alphabet, self.pre.length
        before = cube(alphabet, length, {c.index: [c.before] for c in self.changes})
        after = cube(alphabet, length, {c.index: [c.after] for c in self.changes})
        object.__setattr__(self, "before_cube", before)
        object.__setattr__(self, "after_cube", after)
        if intersection(self.pre, before) != self.pre:
            raise ContractError(f"move {self.label!r}: pre must fix every changed index to its before symbol")

    @property
    def before_constraints(self):
        return {c.index: [c.before] for c in self.changes}

    @property
    def after_constraints(self):
        return {c.index: [c.after] for c in self.changes}


class MoveList(tuple):
    """Moves of one player, optionally sharing a common precondition factor.

    When ``guard`` is given, moves whose ``pre`` equals ``guard`` intersected
    with their before-symbol cube are evaluated by restricting to the cube
    and applying the guard once for the whole list.
    """

    guard: PositionSet | None

    def __new__(cls, moves=(), guard=None):
        self = super().__new__(cls, moves)
        self.guard = guard
        first = self[0].pre if self else None
        for m in self:
            if (m.pre.alphabet, m.pre.length) != (first.alphabet, first.length):
                raise ContractError("all moves must share alphabet and length")
        self._pre_kind = tuple(self._classify_pre(m) for m in self)
        # post is a no-op when it already contains every after-symbol string
        self._post_trivial = tuple((m.after_cube - m.post).is_empty for m in self)
        return self

    def _classify_pre(self, m):
        if m.pre == m.before_cube:
            return "cube"
        if self.guard is not None and m.pre == intersection(self.guard, m.before_cube):
            return "guarded"
        return "general"


def _run(tasks, workers):
    if workers and workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda f: f(), tasks))
    return [f() for f in tasks]


def _combine(s, plain, guarded, guard):
    parts = [x for x in plain if not x.is_empty]
    guarded = [x for x in guarded if not x.is_empty]
    if guarded:
        parts.append(intersection(guard, union_many(guarded)))
    if not parts:
        return empty_set(s.alphabet, s.length)
    return union_many(parts)


def forward(s: PositionSet, moves: MoveList, workers: int = 1) -> PositionSet:
    """Positions reachable from ``s`` by one move in ``moves``."""
    if not isinstance(moves, MoveList):
        moves = MoveList(moves)
    if s.is_empty or not moves:
        return empty_set(s.alphabet, s.length)
    guarded_src = None
    if "guarded" in moves._pre_kind:
        guarded_src = intersection(s, moves.guard)

    def pipeline(m, kind, post_trivial):
        if kind == "general":
            x = intersection(s, m.pre)
        else:
            x = restrict(guarded_src if kind == "guarded" else s, m.before_constraints)
        if x.is_empty:
            return x
        y = apply_changes(x, m.changes)
        return y if post_trivial else intersection(y, m.post)

    tasks = [
        (lambda m=m, kind=kind, pt=pt: pipeline(m, kind, pt))
        for m, kind, pt in zip(moves, moves._pre_kind, moves._post_trivial)
    ]
    results = _run(tasks, workers)
    return _combine(s, results, [], None)


def reverse(s: PositionSet, moves: MoveList, workers: int = 1) -> PositionSet:
    """Positions with a move in ``moves`` into ``s``."""
    if not isinstance(moves, MoveList):
        moves = MoveList(moves)
    if s.is_empty or not moves:
        return empty_set(s.alphabet, s.length)

    def pipeline(m, kind, post_trivial):
        x = s if post_trivial else intersection(s, m.post)
        x = restrict(x, m.after_constraints)
        if x.is_empty:
            return x
        y = apply_changes_reverse(x, m.changes)
        return intersection(y, m.pre) if kind == "general" else y

    tasks = [
        (lambda m=m, kind=kind, pt=pt: pipeline(m, kind, pt))
        for m, kind, pt in zip(moves, moves._pre_kind, moves._post_trivial)
    ]
    results = _run(tasks, workers)
    plain = [r for r, kind in zip(results, moves._pre_kind) if kind != "guarded"]
    guarded = [r for r, kind in zip(results, moves._pre_kind) if kind == "guarded"]
    return _combine(s, plain, guarded, moves.guard)
