"""Structure of a mapping letter's functional graph.

A total mapping f on n states decomposes into cycles with trees hanging off
them.  This module computes the cyclic points (states on cycles), per-state
heights (distance to the cyclic part), the lexicographically least merging
pair, and the threshold event used by the experiments: cyclic-point count or
height exceeding 2*sqrt(n*ln n).  Logarithms are natural throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MappingProfile:
    """Cyclic points, heights and least merging pair of one mapping letter."""

    cyclic_points: np.ndarray      # sorted state indices
    heights: np.ndarray            # int32, length n; 0 exactly on cyclic points
    max_height: int
    merging_pair: tuple | None     # (p1, p2), p1 < p2, mapped to the same state

    @property
    def cyclic_count(self) -> int:
        return int(self.cyclic_points.size)


def _as_mapping(table) -> np.ndarray:
    arr = np.asarray(table, dtype=np.int32)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError("mapping must be a non-empty 1-d table")
    n = arr.size
    if int(arr.min()) < 0 or int(arr.max()) >= n:
        raise ValueError(f"mapping entry out of range [0, {n})")
    return arr


def preimage_csr(table) -> tuple:
    """Preimage lists of a mapping in CSR form.

    Returns (order, starts, counts): order lists all states sorted by their
    image (ties by state index), so the preimages of x are
    order[starts[x] : starts[x] + counts[x]], in increasing order.
    """
    arr = _as_mapping(table)
    n = arr.size
    order = np.argsort(arr, kind="stable").astype(np.int32)
    counts = np.bincount(arr, minlength=n).astype(np.int64)
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    return order, starts, counts


def analyze_mapping(table) -> MappingProfile:
    """Full profile of one mapping letter.

    Cyclic points come from iterating the table to a power at least n-1 (the
    image then equals the cyclic set exactly); heights from a reverse BFS out
    of the cyclic set along preimage edges.
    """
    arr = _as_mapping(table)
    n = arr.size

    power = arr
    span = 1
    while span < n - 1:
        power = power[power]
        span *= 2
    cyclic = np.unique(power)

    order, starts, counts = preimage_csr(arr)
    heights = np.full(n, -1, dtype=np.int32)
    heights[cyclic] = 0
    frontier = cyclic
    level = 0
    while frontier.size:
        level += 1
        c = counts[frontier]
        total = int(c.sum())
        if total == 0:
            break
        base = np.repeat(starts[frontier], c)
        seg = np.concatenate(([0], np.cumsum(c)[:-1]))
        offs = np.arange(total, dtype=np.int64) - np.repeat(seg, c)
        preds = order[base + offs]
        fresh = preds[heights[preds] < 0]
        heights[fresh] = level
        frontier = fresh
    max_height = int(heights.max())

    merging_pair = None
    multi = np.nonzero(counts >= 2)[0]
    if multi.size:
        first = order[starts[multi]].astype(np.int64)
        second = order[starts[multi] + 1].astype(np.int64)
        best = int(np.argmin(first * n + second))
        merging_pair = (int(first[best]), int(second[best]))

    cyclic.setflags(write=False)
    heights.setflags(write=False)
    return MappingProfile(cyclic, heights, max_height, merging_pair)


def lemma1_threshold(n: int) -> float:
    """The cyclic-count / height threshold 2*sqrt(n*ln n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 2.0 * math.sqrt(n * math.log(n))


def lemma1_event(table) -> bool:
    """True when the mapping has more than 2*sqrt(n*ln n) cyclic points or
    height greater than 2*sqrt(n*ln n)."""
    profile = analyze_mapping(table)
    threshold = lemma1_threshold(len(profile.heights))
    return profile.cyclic_count > threshold or profile.max_height > threshold


def contraction_budget(n: int) -> int:
    """ceil(2*sqrt(n*ln n)): repetitions of the mapping letter that, outside
    the threshold event, contract the full state set to at most that many
    states.  0 for n = 1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return 0
    return math.ceil(lemma1_threshold(n))
