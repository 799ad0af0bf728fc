"""BFS over unordered state pairs under two permutation letters.

An unordered pair {u, v} with u < v is indexed triangularly as
u*n - u*(u+1)/2 + (v - u - 1).  Permutations act bijectively on pairs, so a
single reverse BFS from a target pair (stepping through the permutations'
inverses) yields, for every pair, the exact length of the shortest forward
product reaching the target, plus the first letter of one such product.
Distances are 16-bit with a sentinel for unreachable; at n = 10^4 the table
is ~5*10^7 entries, so compactness matters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

try:
    from numba import njit as _njit
except ImportError:  # numba is an optional accelerator; numpy path is equivalent
    _njit = None

UNREACHABLE = 0xFFFF          # uint16 distance sentinel
_NO_LETTER = 0xFF             # uint8 parent sentinel (target / unreachable)
_CHUNK = 1 << 20              # frontier elements processed per vector op batch
EXACT_DIAMETER_MAX_N = 128


class PairUnreachableError(Exception):
    """A requested pair has no product routing it to the table's target."""


def pair_count(n: int) -> int:
    return n * (n - 1) // 2


def pair_index(u: int, v: int, n: int) -> int:
    """Triangular index of the unordered pair {u, v}."""
    if u == v:
        raise ValueError("pair needs two distinct states")
    if u > v:
        u, v = v, u
    if u < 0 or v >= n:
        raise ValueError(f"pair ({u},{v}) out of range for n={n}")
    return u * (2 * n - u - 1) // 2 + (v - u - 1)


def pair_decode(index: int, n: int) -> tuple:
    """Inverse of pair_index."""
    if not 0 <= index < pair_count(n):
        raise ValueError(f"pair index {index} out of range for n={n}")
    u = int(((2 * n - 1) - math.sqrt((2 * n - 1) ** 2 - 8 * index)) // 2)
    while u * (2 * n - u - 1) // 2 > index:
        u -= 1
    while (u + 1) * (2 * n - u - 2) // 2 <= index:
        u += 1
    v = index - u * (2 * n - u - 1) // 2 + u + 1
    return u, v


def encode_pairs(lo: np.ndarray, hi: np.ndarray, n: int) -> np.ndarray:
    """Vectorized pair_index for component arrays with lo < hi."""
    lo64 = lo.astype(np.int64)
    return lo64 * (2 * n - 1 - lo64) // 2 + (hi - lo - 1)


class PairEncoder:
    """Repeated pair encoding at fixed n via one row-offset gather.

    pair_index(u, v) = offsets[u] + v with offsets[u] = u(2n-u-1)/2 - u - 1,
    which turns the quadratic into a single table lookup per element.
    """

    def __init__(self, n: int):
        self.n = n
        u = np.arange(n, dtype=np.int64)
        offsets = u * (2 * n - 1 - u) // 2 - u - 1
        self.offsets = offsets if n > 30_000 else offsets.astype(np.int32)

    def encode(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        return self.offsets[lo] + hi


def invert_permutation(table) -> np.ndarray:
    table = np.asarray(table, dtype=np.int32)
    inv = np.empty_like(table)
    inv[table] = np.arange(table.size, dtype=np.int32)
    return inv


def _normalize_pair(pair, n: int) -> tuple:
    if isinstance(pair, (int, np.integer)):
        return pair_decode(int(pair), n)
    u, v = int(pair[0]), int(pair[1])
    if u > v:
        u, v = v, u
    if u == v or u < 0 or v >= n:
        raise ValueError(f"invalid pair {pair!r} for n={n}")
    return u, v


def _check_perm_letters(aut, perm_letters) -> tuple:
    li, lj = int(perm_letters[0]), int(perm_letters[1])
    for letter in (li, lj):
        if not aut.is_permutation(letter):
            raise ValueError(f"letter {letter} is not a permutation")
    return li, lj


@dataclass
class PairRoutingTable:
    """Shortest-product distances and first-step letters toward one target pair."""

    n: int
    perm_letters: tuple
    target: int                        # pair index
    dist: np.ndarray                   # uint16, UNREACHABLE where no product exists
    parent_letter: np.ndarray          # uint8, letter of the first step of a shortest route
    _tables: dict = field(repr=False, default_factory=dict)

    @property
    def reachable_count(self) -> int:
        return int((self.dist != UNREACHABLE).sum())

    def distance(self, pair) -> int:
        u, v = _normalize_pair(pair, self.n)
        d = int(self.dist[pair_index(u, v, self.n)])
        if d == UNREACHABLE:
            raise PairUnreachableError(f"pair ({u},{v}) cannot reach the target")
        return d


if _njit is not None:

    @_njit(cache=True)
    def _expand_level_jit(inv_a, inv_b, letter_a, letter_b, fu, fv, offsets,
                          seen_bits, dist, parent, level, out_u, out_v):  # pragma: no cover
        # the bitset keeps the hot membership probes in cache; dist/parent
        # are each written exactly once per discovered pair
        count = 0
        for step in range(2):
            inv = inv_a if step == 0 else inv_b
            letter = letter_a if step == 0 else letter_b
            for i in range(fu.size):
                u = inv[fu[i]]
                v = inv[fv[i]]
                if u > v:
                    u, v = v, u
                pid = offsets[u] + v
                byte = pid >> 3
                mask = np.uint8(1 << (pid & 7))
                if seen_bits[byte] & mask == 0:
                    seen_bits[byte] |= mask
                    dist[pid] = level
                    parent[pid] = letter
                    out_u[count] = u
                    out_v[count] = v
                    count += 1
        return count


def _expand_level_numpy(steps, encoder, dist, parent, fu, fv, level):
    """One numpy-vectorized BFS level; returns the next frontier."""
    parts_u, parts_v = [], []
    for letter, inv in steps:
        for start in range(0, fu.size, _CHUNK):
            pu = inv[fu[start:start + _CHUNK]]
            pv = inv[fv[start:start + _CHUNK]]
            lo = np.minimum(pu, pv)
            hi = np.maximum(pu, pv)
            pid = encoder.encode(lo, hi)
            fresh = dist[pid] == UNREACHABLE
            count = int(np.count_nonzero(fresh))
            if count == 0:
                continue
            if count == fresh.size:
                new_pid, new_lo, new_hi = pid, lo, hi
            else:
                new_pid, new_lo, new_hi = pid[fresh], lo[fresh], hi[fresh]
            dist[new_pid] = level
            parent[new_pid] = letter
            parts_u.append(new_lo)
            parts_v.append(new_hi)
    if parts_u:
        return np.concatenate(parts_u), np.concatenate(parts_v)
    return fu[:0], fv[:0]


def build_routing_table(aut, perm_letters, target) -> PairRoutingTable:
    """Reverse BFS from the target pair over both permutations' inverses.

    dist[p] is the exact length of the shortest forward product of the two
    permutations mapping pair p onto the target; parent_letter[p] is the first
    letter of one shortest product.  O(n^2) time and space.  Uses a fused
    numba kernel when available; the numpy path computes identical tables.
    """
    n = aut.n
    if n < 2:
        raise ValueError("pair routing needs n >= 2")
    li, lj = _check_perm_letters(aut, perm_letters)
    tu, tv = _normalize_pair(target, n)
    tpid = pair_index(tu, tv, n)

    total = pair_count(n)
    dist = np.full(total, UNREACHABLE, dtype=np.uint16)
    parent = np.full(total, _NO_LETTER, dtype=np.uint8)
    dist[tpid] = 0

    if _njit is not None:
        inv_a = invert_permutation(aut.letters[li])
        inv_b = invert_permutation(aut.letters[lj])
        u = np.arange(n, dtype=np.int64)
        offsets = u * (2 * n - 1 - u) // 2 - u - 1
        seen = np.zeros((total + 7) // 8, dtype=np.uint8)
        seen[tpid >> 3] |= np.uint8(1 << (tpid & 7))
        fu = np.array([tu], dtype=np.int32)
        fv = np.array([tv], dtype=np.int32)
        level = 0
        while fu.size:
            level += 1
            if level >= UNREACHABLE:
                raise RuntimeError("pair distance exceeds 16-bit range")
            out_u = np.empty(2 * fu.size, dtype=np.int32)
            out_v = np.empty(2 * fu.size, dtype=np.int32)
            count = _expand_level_jit(inv_a, inv_b, li, lj, fu, fv, offsets,
                                      seen, dist, parent, level, out_u, out_v)
            fu = out_u[:count]
            fv = out_v[:count]
    else:
        # int16 state ids halve the element traffic through the pipeline
        idx_dtype = np.int16 if n <= 32767 else np.int32
        steps = tuple((letter, invert_permutation(aut.letters[letter]).astype(idx_dtype))
                      for letter in (li, lj))
        encoder = PairEncoder(n)
        fu = np.array([tu], dtype=idx_dtype)
        fv = np.array([tv], dtype=idx_dtype)
        level = 0
        while fu.size:
            level += 1
            if level >= UNREACHABLE:
                raise RuntimeError("pair distance exceeds 16-bit range")
            fu, fv = _expand_level_numpy(steps, encoder, dist, parent, fu, fv, level)

    tables = {letter: aut.letters[letter] for letter in (li, lj)}
    return PairRoutingTable(n, (li, lj), tpid, dist, parent, tables)


def route_pair(table: PairRoutingTable, source) -> list:
    """Word read off the parent pointers; applying it maps the source pair
    onto the target pair (as a set).  Length equals dist[source]."""
    u, v = _normalize_pair(source, table.n)
    pid = pair_index(u, v, table.n)
    expected = int(table.dist[pid])
    if expected == UNREACHABLE:
        raise PairUnreachableError(f"pair ({u},{v}) cannot reach the target pair")
    word = []
    while pid != table.target:
        letter = int(table.parent_letter[pid])
        word.append(letter)
        step = table._tables[letter]
        u, v = int(step[u]), int(step[v])
        if u > v:
            u, v = v, u
        pid = pair_index(u, v, table.n)
    if len(word) != expected:
        raise RuntimeError("routing walk disagrees with stored distance")
    return word


def distance_histogram(table: PairRoutingTable) -> tuple:
    """(counts-by-distance array, number of unreachable pairs)."""
    reachable = table.dist[table.dist != UNREACHABLE]
    unreachable = int(table.dist.size - reachable.size)
    counts = np.bincount(reachable.astype(np.int64)) if reachable.size else np.zeros(0, np.int64)
    return counts, unreachable


def _exact_diameter(aut, li: int, lj: int) -> float:
    """Max shortest product length over all (source, target) pairs.

    Keeps one bit per (source, target): column t of the reach matrix picks up
    column pre(t) under each letter every round, so round d holds reach-in-<=d.
    The diameter is the first round where every bit is set.
    """
    n = aut.n
    total = pair_count(n)
    u_of, v_of = np.triu_indices(n, k=1)

    cols = []
    for letter in (li, lj):
        inv = invert_permutation(aut.letters[letter])
        lo = np.minimum(inv[u_of], inv[v_of])
        hi = np.maximum(inv[u_of], inv[v_of])
        cols.append(encode_pairs(lo, hi, n))

    words = (total + 63) // 64
    reach = np.zeros((words, total), dtype=np.uint64)
    idx = np.arange(total)
    reach[idx >> 6, idx] = np.left_shift(np.uint64(1), (idx & 63).astype(np.uint64))

    expected = np.full(words, np.uint64(0xFFFFFFFFFFFFFFFF))
    tail = total - 64 * (words - 1)
    if tail < 64:
        expected[-1] = np.uint64((1 << tail) - 1)

    if np.all(reach == expected[:, None]):
        return 0
    for level in range(1, total + 1):
        nxt = reach[:, cols[0]]
        nxt |= reach[:, cols[1]]
        nxt |= reach
        if np.all(nxt == expected[:, None]):
            return level
        if np.array_equal(nxt, reach):
            return math.inf
        reach = nxt
    raise RuntimeError("pair reach closure failed to converge")


def pair_diameter(aut, perm_letters, sample=None, rng=None):
    """Largest shortest-product length between pairs.

    Exact mode (sample=None) is capped at n = 128 (O(n^4) work).  Sampled mode
    takes the max over at least `sample` uniformly drawn (source, target)
    pairs, drawn as a targets-by-sources grid so one BFS per target is
    amortized over many sources.  Returns math.inf when an unreachable pair
    is encountered.
    """
    n = aut.n
    li, lj = _check_perm_letters(aut, perm_letters)
    if n < 2:
        raise ValueError("pair diameter needs n >= 2")
    total = pair_count(n)
    if total == 1:
        return 0
    if sample is None:
        if n > EXACT_DIAMETER_MAX_N:
            raise ValueError(
                f"exact diameter is capped at n={EXACT_DIAMETER_MAX_N}; use sampled mode"
            )
        return _exact_diameter(aut, li, lj)
    sample = int(sample)
    if sample < 1:
        raise ValueError("sample count must be >= 1")
    if rng is None:
        raise ValueError("sampled mode needs an rng")
    targets = math.isqrt(sample)
    if targets * targets < sample:
        targets += 1
    per_target = -(-sample // targets)
    best = 0
    for _ in range(targets):
        table = build_routing_table(aut, (li, lj), rng.next_below(total))
        for _ in range(per_target):
            d = int(table.dist[rng.next_below(total)])
            if d == UNREACHABLE:
                return math.inf
            best = max(best, d)
    return best
