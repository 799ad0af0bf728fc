"""Brute-force reference implementations used to cross-check the library.

Everything here is deliberately naive pure Python over plain lists: state
walks, per-state iteration for functional-graph structure, and exhaustive
word enumeration.  None of it shares code paths with the package.
"""

from itertools import product


def walk(tables, word, state):
    for letter in word:
        state = tables[letter][state]
    return state


def image(tables, word, states):
    return {walk(tables, word, s) for s in states}


def mapping_profile(table):
    """Cyclic points, heights and least merging pair by direct iteration."""
    n = len(table)
    cyclic = set()
    for s in range(n):
        x = s
        for _ in range(n):
            x = table[x]
            if x == s:
                cyclic.add(s)
                break
    heights = []
    for s in range(n):
        x, h = s, 0
        while x not in cyclic:
            x = table[x]
            h += 1
        heights.append(h)
    merging = None
    for p1 in range(n):
        partners = [p2 for p2 in range(p1 + 1, n) if table[p2] == table[p1]]
        if partners:
            merging = (p1, min(partners))
            break
    return cyclic, heights, max(heights), merging


def shortest_sync_brute(tables, n, max_len):
    """Shortest synchronizing word by enumerating every word in length order.

    Each word is applied from scratch to every state.  Returns (length, word)
    or None if nothing synchronizes within max_len.
    """
    k = len(tables)
    states = list(range(n))
    for length in range(max_len + 1):
        for word in product(range(k), repeat=length):
            if len(image(tables, word, states)) == 1:
                return length, list(word)
    return None


def pair_product_distances(tables, perm_indices, n, target, max_len):
    """Shortest product of the two permutations mapping each pair onto the
    target pair (as a set), by enumerating all products up to max_len.

    Returns {(u, v): length} for pairs solved within max_len.
    """
    target = frozenset(target)
    found = {}
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    for length in range(max_len + 1):
        for word in product(perm_indices, repeat=length):
            for u, v in pairs:
                if (u, v) in found:
                    continue
                if frozenset(image(tables, word, (u, v))) == target:
                    found[(u, v)] = length
    return found


def is_synchronizing_brute(tables, n, max_len=None):
    """True iff some word up to max_len synchronizes (max_len defaults to a
    safe bound for tiny n)."""
    if max_len is None:
        max_len = 2 ** n
    return shortest_sync_brute(tables, n, max_len) is not None
