"""Compiled per-layer kernels for layered DFAs.

Every kernel works on one depth at a time. A layer is an ``(n, k)`` int32
array of target indices into the next layer; row 0 is always the rejecting
sink. The Python drivers in :mod:`cgs.dfa` and :mod:`cgs.algebra` loop over
depths and stitch the layers together.
"""

import numba as nb
import numpy as np

UNION = 0
INTERSECTION = 1
DIFFERENCE = 2

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX = np.uint64(0xBF58476D1CE4E5B9)


@nb.njit(cache=True, inline="always")
def _mix(h, v):
    x = (h ^ np.uint64(v)) * _GOLDEN
    x ^= x >> np.uint64(29)
    x *= _MIX
    x ^= x >> np.uint64(32)
    return x


@nb.njit(cache=True, inline="always")
def _table_size(n):
    cap = 16
    while cap < 2 * n:
        cap <<= 1
    return cap


@nb.njit(cache=True, inline="always")
def _live(op, a, b):
    if op == UNION:
        return a != 0 or b != 0
    if op == INTERSECTION:
        return a != 0 and b != 0
    return a != 0


@nb.njit(cache=True, nogil=True)
def product_level(rows_a, rows_b, pa, pb, n_b_next, op, last):
    """Expand one depth of the reachable product automaton.

    ``pa``/``pb`` list the state pairs of this depth (pair 0 is the dead
    pair). Returns the raw transition rows for this depth and the pair
    lists of the next depth. On the last depth targets are 0/1 directly.
    """
    m = pa.shape[0]
    k = rows_a.shape[1]
    out = np.zeros((m, k), np.int32)
    if last:
        for i in range(1, m):
            for c in range(k):
                a = rows_a[pa[i], c]
                b = rows_b[pb[i], c]
                if op == UNION:
                    v = 1 if (a == 1 or b == 1) else 0
                elif op == INTERSECTION:
                    v = 1 if (a == 1 and b == 1) else 0
                else:
                    v = 1 if (a == 1 and b == 0) else 0
                out[i, c] = v
        return out, np.zeros(1, np.int64), np.zeros(1, np.int64)

    cap = _table_size(m * k + 1)
    mask = np.uint64(cap - 1)
    keys = np.full(cap, -1, np.int64)
    vals = np.zeros(cap, np.int32)
    next_a = np.zeros(m * k + 1, np.int64)
    next_b = np.zeros(m * k + 1, np.int64)
    count = 1
    for i in range(1, m):
        for c in range(k):
            a = rows_a[pa[i], c]
            b = rows_b[pb[i], c]
            if not _live(op, a, b):
                continue
            key = np.int64(a) * n_b_next + b
            slot = _mix(np.uint64(0), key) & mask
            while True:
                existing = keys[slot]
                if existing == -1:
                    keys[slot] = key
                    vals[slot] = count
                    next_a[count] = a
                    next_b[count] = b
                    out[i, c] = count
                    count += 1
                    break
                if existing == key:
                    out[i, c] = vals[slot]
                    break
                slot = (slot + np.uint64(1)) & mask
    return out, next_a[:count].copy(), next_b[:count].copy()


@nb.njit(cache=True, nogil=True)
def merge_level(rows, cls_next):
    """Hash-cons one depth bottom-up.

    Rows are first rewritten through ``cls_next`` (the equivalence classes of
    the next depth). All-zero rows fall into class 0; other rows get a class
    per distinct vector. Returns the class of each input row and the table of
    distinct rows (row 0 is the zero row).
    """
    n, k = rows.shape
    cls = np.zeros(n, np.int32)
    uniq = np.zeros((n + 1, k), np.int32)
    cap = _table_size(n + 1)
    mask = np.uint64(cap - 1)
    table = np.full(cap, -1, np.int32)
    tmp = np.zeros(k, np.int32)
    u = 1
    for i in range(n):
        nonzero = False
        h = np.uint64(k)
        for c in range(k):
            t = cls_next[rows[i, c]]
            tmp[c] = t
            if t != 0:
                nonzero = True
            h = _mix(h, t)
        if not nonzero:
            continue
        slot = h & mask
        while True:
            j = table[slot]
            if j == -1:
                table[slot] = u
                for c in range(k):
                    uniq[u, c] = tmp[c]
                cls[i] = u
                u += 1
                break
            same = True
            for c in range(k):
                if uniq[j, c] != tmp[c]:
                    same = False
                    break
            if same:
                cls[i] = j
                break
            slot = (slot + np.uint64(1)) & mask
    return cls, uniq[:u].copy()


@nb.njit(cache=True, nogil=True)
def renumber_level(uniq, order, n_next):
    """Emit the canonical rows for one depth, top-down.

    ``order`` lists the class ids of this depth in canonical order (sink
    excluded). Next-depth classes are numbered by first occurrence while
    scanning rows in order and symbols in order, which is exactly the
    depth-first preorder numbering restricted to one depth.
    """
    m = order.shape[0]
    k = uniq.shape[1]
    out = np.zeros((m + 1, k), np.int32)
    ids = np.zeros(n_next, np.int32)
    nxt = np.zeros(n_next, np.int32)
    count = 0
    for i in range(m):
        r = order[i]
        for c in range(k):
            t = uniq[r, c]
            if t == 0:
                continue
            if ids[t] == 0:
                count += 1
                ids[t] = count
                nxt[count - 1] = t
            out[i + 1, c] = ids[t]
    return out, nxt[:count].copy()


@nb.njit(cache=True, nogil=True)
def is_canonical_level(rows, n_next):
    """Check sink row, no dead rows, and first-occurrence numbering."""
    n, k = rows.shape
    for c in range(k):
        if rows[0, c] != 0:
            return False
    seen = 0
    for i in range(1, n):
        nonzero = False
        for c in range(k):
            t = rows[i, c]
            if t < 0 or t >= n_next:
                return False
            if t == 0:
                continue
            nonzero = True
            if t > seen + 1:
                return False
            if t == seen + 1:
                seen += 1
        if not nonzero:
            return False
    return seen == n_next - 1
