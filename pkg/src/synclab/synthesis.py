"""Synchronizing-word constructors.

Three routes to a synchronizing word:

* :func:`constructive_synchronize` - repeat the mapping letter to contract the
  state set, then repeatedly route two surviving states onto the mapping
  letter's merging pair through the two permutation letters and merge them.
* :func:`greedy_synchronize` - classic baseline: repeatedly apply a shortest
  word (over all letters) that merges some pair of the current set.
* :func:`exact_reset_threshold` - subset BFS over the power automaton; exact
  but exponential, so capped.

Plus :func:`is_synchronizing`, the polynomial pair-reachability check.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .automaton import Automaton, apply_word
from .funcgraph import analyze_mapping, contraction_budget, preimage_csr
from .pairgraph import (
    PairEncoder,
    PairUnreachableError,
    build_routing_table,
    invert_permutation,
    pair_count,
    route_pair,
)

ROUTING = "routing"
NO_MERGE = "no-merge"
NOT_SYNCHRONIZING = "not-synchronizing"
TOO_LARGE = "too-large"

_CHUNK = 1 << 20


class SynthesisFailure(Exception):
    """Structured failure: kind is one of routing, no-merge,
    not-synchronizing, too-large."""

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


@dataclass(frozen=True)
class RoleAssignment:
    """Which letter contracts (the mapping) and which two route (permutations)."""

    mapping_letter: int
    perm_letters: tuple

    def validate(self, aut: Automaton) -> None:
        indices = (self.mapping_letter, *self.perm_letters)
        if len(self.perm_letters) != 2:
            raise ValueError("role assignment needs exactly two permutation letters")
        for idx in indices:
            aut._check_letter(int(idx))
        if len(set(int(i) for i in indices)) != 3:
            raise ValueError("role letter indices must be distinct")
        for idx in self.perm_letters:
            if not aut.is_permutation(int(idx)):
                raise ValueError(f"letter {idx} is not a permutation")


@dataclass
class SynthesisResult:
    """A synchronizing word plus audit counters for the bound check."""

    word: list
    final_state: int
    iterations: int            # merge rounds
    max_route_len: int         # longest routing word used
    bound_value: int           # budget + (budget-1) * (max_route_len+1), clamped at n=1
    contracted_size: int | None = None   # set size after the contraction block


def _shrink(table: np.ndarray, states: np.ndarray) -> np.ndarray:
    return np.unique(table[states])


def is_synchronizing(aut: Automaton) -> bool:
    """True iff every unordered pair can reach a merged configuration.

    Reverse BFS over the pair automaton seeded with every pair some letter
    merges directly; permutation letters step back through their inverses,
    other letters through CSR preimage cross products.
    """
    n = aut.n
    if n == 1:
        return True
    total = pair_count(n)
    visited = np.zeros(total, dtype=bool)

    perm_invs = []
    mapping_csrs = []
    seed_u, seed_v = [], []
    for letter in range(aut.k):
        table = aut.letters[letter]
        if aut.is_permutation(letter):
            perm_invs.append(invert_permutation(table))
            continue
        order, starts, counts = preimage_csr(table)
        mapping_csrs.append((order, starts, counts))
        for target in np.nonzero(counts >= 2)[0]:
            group = order[starts[target]: starts[target] + counts[target]]
            for gu, gv in _group_pairs(group):
                seed_u.append(gu)
                seed_v.append(gv)
    if not seed_u:
        return False

    encoder = PairEncoder(n)
    fu = np.concatenate(seed_u)
    fv = np.concatenate(seed_v)
    pid, keep = np.unique(encoder.encode(fu, fv), return_index=True)
    visited[pid] = True
    fu, fv = fu[keep], fv[keep]

    chunk = max(_CHUNK, n)
    while fu.size:
        parts_u, parts_v = [], []

        def absorb(lo, hi):
            pid = encoder.encode(lo, hi)
            fresh = ~visited[pid]
            if fresh.any():
                visited[pid[fresh]] = True
                parts_u.append(lo[fresh])
                parts_v.append(hi[fresh])

        for inv in perm_invs:
            for start in range(0, fu.size, chunk):
                pu = inv[fu[start:start + chunk]]
                pv = inv[fv[start:start + chunk]]
                absorb(np.minimum(pu, pv), np.maximum(pu, pv))

        for order, starts, counts in mapping_csrs:
            for xs, ys in _windows(fu, fv, counts, chunk):
                # phase 1: expand over preimages of the first component
                cx = counts[xs]
                u1 = order[_segment_indices(starts[xs], cx)]
                y1 = np.repeat(ys, cx)
                # phase 2: expand the result over preimages of the second
                for u2, y2 in _windows(u1, y1, counts, chunk, key_on_second=True):
                    cy = counts[y2]
                    v2 = order[_segment_indices(starts[y2], cy)]
                    u3 = np.repeat(u2, cy)
                    absorb(np.minimum(u3, v2), np.maximum(u3, v2))

        if parts_u:
            fu = np.concatenate(parts_u)
            fv = np.concatenate(parts_v)
        else:
            fu = fv = np.empty(0, dtype=np.int32)
    return bool(visited.all())


def _segment_indices(seg_starts: np.ndarray, seg_counts: np.ndarray) -> np.ndarray:
    """Flat indices covering [start, start+count) for each segment, in order."""
    m = int(seg_counts.sum())
    if m == 0:
        return np.empty(0, dtype=np.int64)
    base = np.repeat(seg_starts, seg_counts)
    heads = np.concatenate(([0], np.cumsum(seg_counts)[:-1]))
    return base + (np.arange(m, dtype=np.int64) - np.repeat(heads, seg_counts))


def _windows(first: np.ndarray, second: np.ndarray, counts: np.ndarray, chunk: int,
             key_on_second: bool = False):
    """Slice two parallel arrays so each slice expands to at most ~chunk
    elements when repeated by counts[key]."""
    key = second if key_on_second else first
    sizes = counts[key]
    cum = np.cumsum(sizes)
    pos = 0
    while pos < first.size:
        base = int(cum[pos - 1]) if pos else 0
        end = int(np.searchsorted(cum, base + chunk, side="left")) + 1
        end = max(end, pos + 1)
        end = min(end, first.size)
        yield first[pos:end], second[pos:end]
        pos = end


def constructive_synchronize(aut: Automaton, roles: RoleAssignment) -> SynthesisResult:
    """Contract with the mapping letter, then route-and-merge pairs.

    (1) apply the mapping letter `budget` times (budget = ceil(2*sqrt(n ln n)));
    (2) take the mapping letter's least merging pair; (3) build one routing
    table targeting that pair; (4) while more than one state survives, route
    the two smallest surviving states onto the merging pair and apply the
    mapping letter.  Every round shrinks the set by at least one.
    """
    roles.validate(aut)
    n = aut.n
    if n == 1:
        return SynthesisResult([], 0, 0, 0, 0, contracted_size=1)

    mapping = int(roles.mapping_letter)
    table = aut.letters[mapping]
    profile = analyze_mapping(table)
    if profile.merging_pair is None:
        if not is_synchronizing(aut):
            raise SynthesisFailure(NOT_SYNCHRONIZING, "no word can synchronize this automaton")
        raise SynthesisFailure(NO_MERGE, "mapping letter is a bijection, nothing merges")

    routing = build_routing_table(aut, roles.perm_letters, profile.merging_pair)
    # a fully covered routing table certifies synchronizability outright
    # (route any pair onto the merging pair, then merge); otherwise run the
    # general pair-reachability check before touching the word
    if routing.reachable_count != pair_count(n) and not is_synchronizing(aut):
        raise SynthesisFailure(NOT_SYNCHRONIZING, "no word can synchronize this automaton")

    budget = contraction_budget(n)
    current = np.arange(n, dtype=np.int32)
    for _ in range(budget):
        current = _shrink(table, current)
    contracted = int(current.size)

    word = [mapping] * budget
    rounds = 0
    max_route = 0
    while current.size > 1:
        s1, s2 = int(current[0]), int(current[1])
        try:
            route = route_pair(routing, (s1, s2))
        except PairUnreachableError as exc:
            raise SynthesisFailure(ROUTING, str(exc)) from None
        for letter in route:
            current = aut.letters[letter][current]
        word.extend(route)
        word.append(mapping)
        before = current.size
        current = _shrink(table, current)
        if current.size >= before:
            raise RuntimeError("merge round failed to shrink the state set")
        rounds += 1
        max_route = max(max_route, len(route))

    bound = budget + max(budget - 1, 0) * (max_route + 1)
    return SynthesisResult(word, int(current[0]), rounds, max_route, bound,
                           contracted_size=contracted)


def _shortest_merge_word(aut: Automaton, states: np.ndarray):
    """Multi-source BFS over pairs of `states`: shortest word (over all
    letters) whose application merges some pair.  None if no merge exists."""
    n = aut.n
    total = pair_count(n)
    iu, iv = np.triu_indices(states.size, k=1)
    fu = states[iu].astype(np.int32)
    fv = states[iv].astype(np.int32)

    encoder = PairEncoder(n)
    visited = np.zeros(total, dtype=bool)
    parent_pair = np.full(total, -1, dtype=np.int64)
    parent_letter = np.full(total, -1, dtype=np.int8)
    pids = encoder.encode(fu, fv)
    keep = np.unique(pids, return_index=True)[1]
    fu, fv, pids = fu[keep], fv[keep], pids[keep]
    visited[pids] = True

    while fu.size:
        parts = []
        for letter in range(aut.k):
            tab = aut.letters[letter]
            nu = tab[fu]
            nv = tab[fv]
            merged = np.nonzero(nu == nv)[0]
            if merged.size:
                at = int(merged[0])
                word = [letter]
                pid = int(pids[at])
                while parent_letter[pid] >= 0:
                    word.append(int(parent_letter[pid]))
                    pid = int(parent_pair[pid])
                word.reverse()
                return word
            lo = np.minimum(nu, nv)
            hi = np.maximum(nu, nv)
            cand = encoder.encode(lo, hi)
            fresh = ~visited[cand]
            if fresh.any():
                new = cand[fresh]
                visited[new] = True
                parent_pair[new] = pids[fresh]
                parent_letter[new] = letter
                parts.append((lo[fresh], hi[fresh], new))
        if not parts:
            return None
        fu = np.concatenate([p[0] for p in parts])
        fv = np.concatenate([p[1] for p in parts])
        pids = np.concatenate([p[2] for p in parts])
    return None


def greedy_synchronize(aut: Automaton) -> SynthesisResult:
    """Baseline: repeatedly apply a shortest pair-merging word."""
    n = aut.n
    budget = contraction_budget(n)
    if n == 1:
        return SynthesisResult([], 0, 0, 0, 0)
    current = np.arange(n, dtype=np.int32)
    word = []
    rounds = 0
    max_route = 0
    while current.size > 1:
        merge_word = _shortest_merge_word(aut, current)
        if merge_word is None:
            raise SynthesisFailure(NOT_SYNCHRONIZING, "some pair of states cannot be merged")
        before = current.size
        current = apply_word(aut, merge_word, current)
        if current.size >= before:
            raise RuntimeError("merge word failed to shrink the state set")
        word.extend(merge_word)
        rounds += 1
        max_route = max(max_route, len(merge_word) - 1)
    bound = budget + max(budget - 1, 0) * (max_route + 1)
    return SynthesisResult(word, int(current[0]), rounds, max_route, bound)


def exact_reset_threshold(aut: Automaton, cap_n: int = 20) -> tuple:
    """Provably shortest synchronizing word via BFS over the subset lattice.

    Returns (length, word).  Memory guard: refuses n > cap_n; cap_n itself is
    hard-capped at 24 (2^24 subset bits).
    """
    if cap_n > 24:
        raise ValueError("cap_n hard maximum is 24")
    n = aut.n
    if n > cap_n:
        raise SynthesisFailure(TOO_LARGE, f"n={n} exceeds the subset-BFS cap {cap_n}")
    if n == 1:
        return 0, []

    # byte-sliced OR-image tables: image of a subset = OR over its bytes
    nbytes = (n + 7) // 8
    letter_tables = []
    for letter in range(aut.k):
        tab = aut.letters[letter]
        bit_image = [1 << int(tab[s]) for s in range(n)]
        per_pos = []
        for pos in range(nbytes):
            base = pos * 8
            vals = [0] * 256
            for v in range(1, 256):
                low = v & -v
                ix = base + low.bit_length() - 1
                vals[v] = vals[v ^ low] | (bit_image[ix] if ix < n else 0)
            per_pos.append(vals)
        letter_tables.append(per_pos)

    full = (1 << n) - 1
    visited = bytearray(1 << max(n - 3, 0))
    visited[full >> 3] |= 1 << (full & 7)
    parent = {}
    queue = deque([full])
    while queue:
        cur = queue.popleft()
        for letter, per_pos in enumerate(letter_tables):
            img = 0
            rest = cur
            pos = 0
            while rest:
                byte = rest & 0xFF
                if byte:
                    img |= per_pos[pos][byte]
                rest >>= 8
                pos += 1
            if not visited[img >> 3] & (1 << (img & 7)):
                visited[img >> 3] |= 1 << (img & 7)
                parent[img] = (cur, letter)
                if img & (img - 1) == 0:
                    word = []
                    node = img
                    while node != full:
                        prev, step = parent[node]
                        word.append(step)
                        node = prev
                    word.reverse()
                    return len(word), word
                queue.append(img)
    raise SynthesisFailure(NOT_SYNCHRONIZING, "no singleton is reachable from the full set")
