"""Boolean set operations on :class:`~cgs.dfa.PositionSet`.

Binary operations build only the product states reachable from the initial
pair, one depth at a time, and canonicalize the result immediately.
"""

from __future__ import annotations

import enum
import heapq
from typing import Iterable

import numpy as np

from . import _kernels, telemetry
from .dfa import (
    PositionSet,
    _from_raw,
    check_compatible,
    cube_constraints,
    empty_set,
    restrict,
    universe_set,
)


class BinaryOpKind(enum.IntEnum):
    UNION = _kernels.UNION
    INTERSECTION = _kernels.INTERSECTION
    DIFFERENCE = _kernels.DIFFERENCE


def _product(kind, a, b):
    telemetry.bump("products")
    length = a.length
    if length == 0:
        x, y = a.initial == 1, b.initial == 1
        value = {
            BinaryOpKind.UNION: x or y,
            BinaryOpKind.INTERSECTION: x and y,
            BinaryOpKind.DIFFERENCE: x and not y,
        }[kind]
        return PositionSet(a.alphabet, 0, [], int(value))
    pa = np.array([0, a.initial], np.int64)
    pb = np.array([0, b.initial], np.int64)
    sizes_b = b.layer_sizes()
    raw = []
    for d in range(length):
        last = d == length - 1
        rows, pa, pb = _kernels.product_level(
            a.layers[d], b.layers[d], pa, pb, sizes_b[d + 1], int(kind), last
        )
        raw.append(rows)
        telemetry.bump("product_states", rows.shape[0])
    return _from_raw(a.alphabet, raw, 1)


def binary_op(kind: BinaryOpKind, a: PositionSet, b: PositionSet) -> PositionSet:
    """Union, intersection or difference of two sets over the same strings."""
    check_compatible(a, b)
    kind = BinaryOpKind(kind)
    telemetry.bump("set_ops")
    if kind is BinaryOpKind.UNION:
        if a.is_empty or a is b:
            return b
        if b.is_empty:
            return a
    elif kind is BinaryOpKind.INTERSECTION:
        if a.is_empty or b.is_empty:
            return empty_set(a.alphabet, a.length)
        if a is b:
            return a
        for x, y in ((a, b), (b, a)):
            masks = cube_constraints(y)
            if masks is not None:
                constraints = {
                    d: np.flatnonzero(m) for d, m in enumerate(masks) if not m.all()
                }
                return restrict(x, constraints)
    else:
        if a.is_empty or a is b:
            return empty_set(a.alphabet, a.length)
        if b.is_empty:
            return a
    return _product(kind, a, b)


def union(a: PositionSet, b: PositionSet) -> PositionSet:
    return binary_op(BinaryOpKind.UNION, a, b)


def intersection(a: PositionSet, b: PositionSet) -> PositionSet:
    return binary_op(BinaryOpKind.INTERSECTION, a, b)


def difference(a: PositionSet, b: PositionSet) -> PositionSet:
    return binary_op(BinaryOpKind.DIFFERENCE, a, b)


def inverse(s: PositionSet) -> PositionSet:
    """Complement with respect to all strings of the same length."""
    return difference(universe_set(s.alphabet, s.length), s)


def union_many(sets: Iterable[PositionSet]) -> PositionSet:
    """Union of a non-empty collection, always merging the two smallest sets."""
    sets = list(sets)
    if not sets:
        raise ValueError("union_many needs at least one set")
    for s in sets[1:]:
        check_compatible(sets[0], s)
    live = [s for s in sets if not s.is_empty]
    if not live:
        return sets[0]
    heap = [(s.num_states(), i, s) for i, s in enumerate(live)]
    heapq.heapify(heap)
    tick = len(heap)
    while len(heap) > 1:
        _, _, x = heapq.heappop(heap)
        _, _, y = heapq.heappop(heap)
        merged = union(x, y)
        heapq.heappush(heap, (merged.num_states(), tick, merged))
        tick += 1
    return heap[0][2]


def intersection_many(sets: Iterable[PositionSet]) -> PositionSet:
    sets = list(sets)
    if not sets:
        raise ValueError("intersection_many needs at least one set")
    result = sets[0]
    for s in sorted(sets[1:], key=PositionSet.num_states):
        result = intersection(result, s)
    return result


def is_subset(a: PositionSet, b: PositionSet) -> bool:
    return difference(a, b).is_empty


def is_disjoint(a: PositionSet, b: PositionSet) -> bool:
    return intersection(a, b).is_empty
