"""Layered DFAs over fixed-length strings.

A :class:`PositionSet` stores one transition layer per string index. Layer
``d`` is an ``(n_d, k)`` int32 array whose entries index states of layer
``d + 1``; the implicit final layer has state 0 (reject) and state 1
(accept). Row 0 of every layer is the rejecting sink.

Sets are kept in canonical minimal form: no two states of a layer share a
transition row, every non-sink state reaches accept, and states are numbered
in depth-first preorder from the initial state, visiting symbols in order.
Two sets therefore accept the same language exactly when their layers are
identical arrays, which makes equality and fixpoint checks cheap.
"""

from __future__ import annotations

import hashlib
import itertools
import struct
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from . import _kernels, telemetry
from .errors import (
    AlphabetMismatchError,
    FormatError,
    InvalidSymbolError,
    LengthMismatchError,
    StructuralError,
)

MAGIC = b"CGS1"
FORMAT_VERSION = 1

# count() switches to Python integers once k**L no longer fits in int64.
_INT64_LIMIT = 2**62


@dataclass(frozen=True)
class Alphabet:
    """Ordered square-content labels; index 0 is the empty square."""

    symbols: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if len(self.symbols) < 2:
            raise ValueError("an alphabet needs at least two symbols")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError(f"duplicate symbols in alphabet {self.symbols!r}")

    @property
    def k(self) -> int:
        return len(self.symbols)

    def __len__(self):
        return len(self.symbols)

    def index(self, label: str) -> int:
        try:
            return self.symbols.index(label)
        except ValueError:
            raise InvalidSymbolError(f"unknown symbol {label!r}") from None

    def parse(self, text: str) -> tuple[int, ...]:
        """Map a string of single-character labels to symbol indices."""
        return tuple(self.index(ch) for ch in text)

    def format(self, string: Sequence[int]) -> str:
        return "".join(self.symbols[s] for s in string)


def letters(k: int) -> Alphabet:
    """Alphabet ``a, b, c, ...`` of size ``k`` (handy for tests)."""
    return Alphabet(tuple(chr(ord("a") + i) for i in range(k)))


class PositionSet:
    """Immutable set of fixed-length strings as a canonical layered DFA."""

    __slots__ = ("alphabet", "length", "_layers", "_initial", "_count", "_digest")

    def __init__(self, alphabet, length, layers, initial):
        # Internal constructor: callers guarantee canonical form.
        self.alphabet = alphabet
        self.length = length
        for layer in layers:
            layer.setflags(write=False)
        self._layers = tuple(layers)
        self._initial = int(initial)
        self._count = None
        self._digest = None

    # -- structure -----------------------------------------------------
    @property
    def k(self) -> int:
        return self.alphabet.k

    @property
    def layers(self) -> tuple[np.ndarray, ...]:
        return self._layers

    @property
    def initial(self) -> int:
        return self._initial

    @property
    def is_empty(self) -> bool:
        return self._initial == 0

    def layer_sizes(self) -> list[int]:
        """State counts per depth 0..L, sinks included (depth L: 1 or 2)."""
        return [layer.shape[0] for layer in self._layers] + [1 if self.is_empty else 2]

    def num_states(self) -> int:
        return num_states(self)

    def count(self) -> int:
        return count(self)

    def digest(self) -> str:
        if self._digest is None:
            self._digest = hashlib.sha256(serialize(self)).hexdigest()
        return self._digest

    # -- protocol ------------------------------------------------------
    def __contains__(self, string) -> bool:
        return contains(self, string)

    def __eq__(self, other):
        if not isinstance(other, PositionSet):
            return NotImplemented
        return equal(self, other)

    def __hash__(self):
        return hash(self.digest())

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return iter_strings(self)

    def __or__(self, other):
        from .algebra import union
        return union(self, other)

    def __and__(self, other):
        from .algebra import intersection
        return intersection(self, other)

    def __sub__(self, other):
        from .algebra import difference
        return difference(self, other)

    def __invert__(self):
        from .algebra import inverse
        return inverse(self)

    def __repr__(self):
        return (
            f"PositionSet(k={self.k}, length={self.length}, "
            f"count={self.count()}, states={self.num_states()})"
        )


def check_compatible(a: PositionSet, b: PositionSet) -> None:
    if a.alphabet != b.alphabet or a.length != b.length:
        raise AlphabetMismatchError(
            f"sets differ: k={a.k}/L={a.length} vs k={b.k}/L={b.length}"
        )


def _empty_layers(k, length):
    return [np.zeros((1, k), np.int32) for _ in range(length)]


def _canonical_layers(layers, initial, k):
    """Bottom-up hash-consing, then top-down preorder renumbering."""
    telemetry.bump("canonicalize")
    length = len(layers)
    cls_next = np.array([0, 1], np.int32)
    uniques = [None] * length
    for d in range(length - 1, -1, -1):
        cls_next, uniques[d] = _kernels.merge_level(layers[d], cls_next)
    root = int(cls_next[initial])
    if root == 0:
        return _empty_layers(k, length), 0
    order = np.array([root], np.int32)
    out = []
    for d in range(length):
        n_next = uniques[d + 1].shape[0] if d + 1 < length else 2
        rows, order = _kernels.renumber_level(uniques[d], order, n_next)
        out.append(rows)
    return out, 1


def _from_raw(alphabet, layers, initial):
    out, init = _canonical_layers(layers, initial, alphabet.k)
    return PositionSet(alphabet, len(layers), out, init)


# -- constructors ------------------------------------------------------
def empty_set(alphabet: Alphabet, length: int) -> PositionSet:
    if length < 0:
        raise ValueError("length must be non-negative")
    return PositionSet(alphabet, length, _empty_layers(alphabet.k, length), 0)


def cube(alphabet: Alphabet, length: int, constraints: Mapping[int, Iterable[int]] = None) -> PositionSet:
    """All strings whose symbol at each constrained index is in the allowed set."""
    if length < 0:
        raise ValueError("length must be non-negative")
    k = alphabet.k
    masks = [np.ones(k, bool) for _ in range(length)]
    for index, allowed in (constraints or {}).items():
        if not 0 <= index < length:
            raise LengthMismatchError(f"index {index} outside 0..{length - 1}")
        mask = np.zeros(k, bool)
        for s in allowed:
            if not 0 <= s < k:
                raise InvalidSymbolError(f"symbol {s} outside alphabet of size {k}")
            mask[s] = True
        masks[index] &= mask
    if any(not m.any() for m in masks):
        return empty_set(alphabet, length)
    layers = []
    for mask in masks:
        layer = np.zeros((2, k), np.int32)
        layer[1, mask] = 1
        layers.append(layer)
    return PositionSet(alphabet, length, layers, 1)


def universe_set(alphabet: Alphabet, length: int) -> PositionSet:
    return cube(alphabet, length)


def _as_string_array(alphabet, length, strings):
    if isinstance(strings, np.ndarray):
        arr = strings.astype(np.int64, copy=False)
        if arr.ndim != 2:
            raise LengthMismatchError("expected a 2-d array of strings")
    else:
        rows = [tuple(s) for s in strings]
        for s in rows:
            if len(s) != length:
                raise LengthMismatchError(f"string {s!r} has length {len(s)}, expected {length}")
        arr = np.array(rows, dtype=np.int64).reshape(len(rows), length)
    if arr.shape[1] != length:
        raise LengthMismatchError(f"strings have length {arr.shape[1]}, expected {length}")
    if arr.size and (arr.min() < 0 or arr.max() >= alphabet.k):
        raise InvalidSymbolError(f"symbol outside alphabet of size {alphabet.k}")
    return arr


def from_strings(alphabet: Alphabet, length: int, strings) -> PositionSet:
    """Canonical set accepting exactly ``strings`` (duplicates collapse).

    Builds a trie one depth at a time from the sorted strings, then
    canonicalizes it.
    """
    telemetry.bump("set_ops")
    arr = _as_string_array(alphabet, length, strings)
    if arr.shape[0] == 0:
        return empty_set(alphabet, length)
    if length == 0:
        return PositionSet(alphabet, 0, [], 1)
    arr = np.unique(arr, axis=0)
    n = arr.shape[0]
    k = alphabet.k
    starts = np.zeros(n, bool)
    starts[0] = True
    ids = np.ones(n, np.int64)
    layers = []
    for d in range(length):
        if d + 1 < length:
            starts[1:] |= arr[1:, d] != arr[:-1, d]
            next_ids = np.cumsum(starts)
        else:
            next_ids = np.ones(n, np.int64)
        layer = np.zeros((int(ids[-1]) + 1, k), np.int32)
        layer[ids, arr[:, d]] = next_ids
        layers.append(layer)
        ids = next_ids
    return _from_raw(alphabet, layers, 1)


def canonicalize(alphabet: Alphabet, layers: Sequence, initial: int) -> PositionSet:
    """Canonical form of a raw layered structure.

    ``layers[d]`` is an ``(n_d, k)`` array of indices into layer ``d + 1``
    (the last layer points at 0 = reject / 1 = accept) and row 0 of every
    layer must be an all-zero sink. Duplicate and dead states are merged,
    unreachable states dropped, and states renumbered in preorder.
    """
    k = alphabet.k
    clean = []
    for d, layer in enumerate(layers):
        arr = np.asarray(layer)
        if arr.ndim != 2 or arr.shape[1] != k or arr.shape[0] < 1:
            raise StructuralError(f"layer {d} must have shape (n, {k}) with n >= 1")
        n_next = np.asarray(layers[d + 1]).shape[0] if d + 1 < len(layers) else 2
        if arr.size and (arr.min() < 0 or arr.max() >= n_next):
            raise StructuralError(f"layer {d} has a transition outside 0..{n_next - 1}")
        if arr[0].any():
            raise StructuralError(f"layer {d} row 0 must be the rejecting sink")
        clean.append(np.ascontiguousarray(arr, dtype=np.int32))
    n0 = clean[0].shape[0] if clean else 2
    if not 0 <= initial < n0:
        raise StructuralError(f"initial state {initial} outside layer 0")
    return _from_raw(alphabet, clean, initial)


def restrict(s: PositionSet, constraints: Mapping[int, Iterable[int]]) -> PositionSet:
    """Intersect with a cube in one pass by zeroing disallowed transitions."""
    telemetry.bump("set_ops")
    if s.is_empty or not constraints:
        return s
    layers = list(s.layers)
    for index, allowed in constraints.items():
        if not 0 <= index < s.length:
            raise LengthMismatchError(f"index {index} outside 0..{s.length - 1}")
        keep = np.zeros(s.k, bool)
        keep[list(allowed)] = True
        layer = layers[index].copy()
        layer[:, ~keep] = 0
        layers[index] = layer
    return _from_raw(s.alphabet, layers, s.initial)


def cube_constraints(s: PositionSet):
    """Per-index allowed-symbol masks if ``s`` is a cube, else ``None``."""
    if s.is_empty:
        return None
    if any(layer.shape[0] != 2 for layer in s.layers):
        return None
    return [layer[1] != 0 for layer in s.layers]


# -- queries -------------------------------------------------------------
def _check_string(s, string):
    string = tuple(string)
    if len(string) != s.length:
        raise LengthMismatchError(f"string has length {len(string)}, set has length {s.length}")
    for sym in string:
        if not 0 <= sym < s.k:
            raise InvalidSymbolError(f"symbol {sym} outside alphabet of size {s.k}")
    return string


def contains(s: PositionSet, string: Sequence[int]) -> bool:
    """Membership with exactly ``L`` table lookups."""
    string = _check_string(s, string)
    state = s.initial
    for layer, sym in zip(s.layers, string):
        state = layer[state, sym]
    telemetry.bump("lookups", s.length)
    return bool(state == 1)


def count(s: PositionSet) -> int:
    """Exact number of accepted strings (one backward pass)."""
    if s._count is None:
        big = s.k ** s.length >= _INT64_LIMIT
        paths = np.array([0, 1], dtype=object if big else np.int64)
        for layer in reversed(s.layers):
            paths = paths[layer].sum(axis=1)
        s._count = int(paths[s.initial])
    return s._count


def num_states(s: PositionSet) -> int:
    """Non-sink states over all depths, accept included; 0 for the empty set."""
    if s.is_empty:
        return 0
    return sum(layer.shape[0] - 1 for layer in s.layers) + 1


def iter_strings(s: PositionSet) -> Iterator[tuple[int, ...]]:
    """Accepted strings in lexicographic order (depth-first)."""
    if s.is_empty:
        return
    if s.length == 0:
        yield ()
        return
    rows = [layer.tolist() for layer in s.layers]
    last = s.length - 1
    prefix = [0] * s.length
    stack = [(0, s.initial, 0)]
    while stack:
        depth, state, sym = stack.pop()
        row = rows[depth][state]
        while sym < len(row) and row[sym] == 0:
            sym += 1
        if sym == len(row):
            continue
        stack.append((depth, state, sym + 1))
        prefix[depth] = sym
        if depth == last:
            yield tuple(prefix)
        else:
            stack.append((depth + 1, row[sym], 0))


def enumerate_strings(s: PositionSet, limit: int | None = None) -> list[tuple[int, ...]]:
    """The first ``min(limit, count)`` strings in lexicographic order."""
    return list(itertools.islice(iter_strings(s), limit))


def to_array(s: PositionSet) -> np.ndarray:
    """All accepted strings as an ``(count, L)`` uint8 array, lexicographic."""
    states = np.array([s.initial], np.int64) if not s.is_empty else np.zeros(0, np.int64)
    prefixes = np.zeros((states.shape[0], 0), np.uint8)
    for layer in s.layers:
        rows = layer[states]
        which, sym = np.nonzero(rows)
        prefixes = np.concatenate([prefixes[which], sym[:, None].astype(np.uint8)], axis=1)
        states = rows[which, sym].astype(np.int64)
    return prefixes


def equal(a: PositionSet, b: PositionSet) -> bool:
    check_compatible(a, b)
    if a.initial != b.initial:
        return False
    return all(
        x.shape == y.shape and np.array_equal(x, y) for x, y in zip(a.layers, b.layers)
    )


# -- serialization ---------------------------------------------------------
def serialize(s: PositionSet) -> bytes:
    """Bit-exact binary encoding (see the README for the layout)."""
    sizes = s.layer_sizes()
    parts = [
        MAGIC,
        struct.pack("<III", FORMAT_VERSION, s.k, s.length),
        np.asarray(sizes, dtype="<u8").tobytes(),
    ]
    parts.extend(layer.astype("<u4").tobytes() for layer in s.layers)
    return b"".join(parts)


def deserialize(data: bytes, alphabet: Alphabet | None = None) -> PositionSet:
    """Decode :func:`serialize` output.

    The file stores only the alphabet size; pass ``alphabet`` to attach
    labels, otherwise ``a, b, c, ...`` are used.
    """
    data = bytes(data)
    if len(data) < 16:
        raise FormatError("truncated header")
    if data[:4] != MAGIC:
        raise FormatError(f"bad magic {data[:4]!r}")
    version, k, length = struct.unpack_from("<III", data, 4)
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported format version {version}")
    if alphabet is None:
        alphabet = letters(k)
    elif alphabet.k != k:
        raise FormatError(f"file has k={k}, alphabet has {alphabet.k} symbols")
    offset = 16
    need = offset + 8 * (length + 1)
    if len(data) < need:
        raise FormatError("truncated state counts")
    sizes = np.frombuffer(data, dtype="<u8", count=length + 1, offset=offset).astype(np.int64)
    offset = need
    if sizes[-1] not in (1, 2):
        raise FormatError(f"final layer count must be 1 or 2, got {sizes[-1]}")
    if (sizes[:-1] < 1).any():
        raise FormatError("every layer needs at least the sink state")
    total = int((sizes[:-1] * k).sum()) * 4
    if len(data) != offset + total:
        raise FormatError(
            "truncated transition table" if len(data) < offset + total else "trailing bytes"
        )
    nonempty = sizes[-1] == 2
    layers = []
    for d in range(length):
        n = int(sizes[d])
        raw = np.frombuffer(data, dtype="<u4", count=n * k, offset=offset)
        offset += n * k * 4
        n_next = int(sizes[d + 1])
        if raw.size and raw.max() >= n_next:
            raise FormatError(f"layer {d} has a transition index >= {n_next}")
        layers.append(raw.astype(np.int32).reshape(n, k))
    if not nonempty:
        if any(layer.shape[0] != 1 for layer in layers):
            raise FormatError("empty set must have only sink states")
        return PositionSet(alphabet, length, layers, 0)
    if length and sizes[0] != 2:
        raise FormatError("layer 0 of a non-empty set must hold exactly the initial state")
    for d, layer in enumerate(layers):
        n_next = int(sizes[d + 1])
        if not _kernels.is_canonical_level(layer, n_next):
            raise FormatError(f"layer {d} is not in canonical form")
        if np.unique(layer, axis=0).shape[0] != layer.shape[0]:
            raise FormatError(f"layer {d} has duplicate states")
    return PositionSet(alphabet, length, layers, 1)
