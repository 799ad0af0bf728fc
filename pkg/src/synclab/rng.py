"""Seeded generation of random letters (mappings, p-mappings, permutations).

Every draw goes through an explicit xoshiro256** stream seeded via SplitMix64,
with rejection sampling for bounded integers, so identical seeds reproduce
identical letters bit-for-bit on any platform and Python version.  Nothing in
this module touches global RNG state; trials derive independent seeds with
:func:`derive_trial_seed` and may run in any order or in parallel.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def splitmix64_mix(x: int) -> int:
    """SplitMix64 finalizer: a bijective avalanching mix of a 64-bit word."""
    x &= _MASK64
    x = ((x ^ (x >> 30)) * _MIX1) & _MASK64
    x = ((x ^ (x >> 27)) * _MIX2) & _MASK64
    return x ^ (x >> 31)


def derive_trial_seed(master: int, n: int, trial: int) -> int:
    """Mix (master, n, trial) into an independent 64-bit trial seed.

    Trials keyed by (n, trial) get the same seed no matter which worker runs
    them or in what order, which is what makes experiment output independent
    of scheduling.
    """
    x = (master ^ (n * _GAMMA) ^ (trial * _MIX1)) & _MASK64
    return splitmix64_mix(x)


class Xoshiro256StarStar:
    """xoshiro256** generator, state filled from a SplitMix64 stream."""

    __slots__ = ("_s0", "_s1", "_s2", "_s3")

    def __init__(self, seed: int):
        state = seed & _MASK64
        words = []
        for _ in range(4):
            state = (state + _GAMMA) & _MASK64
            words.append(splitmix64_mix(state))
        if not any(words):
            # all-zero is the one forbidden xoshiro state
            words[0] = _GAMMA
        self._s0, self._s1, self._s2, self._s3 = words

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s0, self._s1, self._s2, self._s3
        x = (s1 * 5) & _MASK64
        result = ((((x << 7) | (x >> 57)) & _MASK64) * 9) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        self._s0, self._s1, self._s2 = s0, s1, s2
        self._s3 = ((s3 << 45) | (s3 >> 19)) & _MASK64
        return result

    def next_below(self, bound: int) -> int:
        """Uniform integer in [0, bound), rejection-sampled (no modulo bias)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (_MASK64 + 1) - ((_MASK64 + 1) % bound)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % bound

    def next_float(self) -> float:
        """Uniform float in [0, 1) with 53-bit resolution."""
        return (self.next_u64() >> 11) * 2.0**-53


class Pmf:
    """Probability mass function over states, normalized on construction."""

    def __init__(self, weights):
        w = np.asarray(weights, dtype=np.float64)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("pmf needs a non-empty 1-d weight sequence")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("pmf weights must be finite and non-negative")
        total = float(w.sum())
        if not total > 0.0:
            raise ValueError("pmf weights sum to zero")
        self.weights = w / total
        self.weights.setflags(write=False)
        cum = np.cumsum(w) / total
        cum[-1] = 1.0
        self._cum = cum

    @property
    def n(self) -> int:
        return int(self.weights.size)

    @classmethod
    def from_file(cls, path) -> "Pmf":
        """Read one weight per line (decimal floating point)."""
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh]
        try:
            weights = [float(ln) for ln in lines if ln]
        except ValueError as exc:
            raise ValueError(f"bad pmf line in {path}: {exc}") from None
        return cls(weights)


def _frozen_table(values) -> np.ndarray:
    table = np.asarray(values, dtype=np.int32)
    table.setflags(write=False)
    return table


def random_mapping(n: int, rng: Xoshiro256StarStar) -> np.ndarray:
    """Letter whose image at each state is i.i.d. uniform over the n states."""
    if n < 1:
        raise ValueError("n must be >= 1")
    nb = rng.next_below
    return _frozen_table([nb(n) for _ in range(n)])


def random_p_mapping(n: int, pmf: Pmf, rng: Xoshiro256StarStar) -> np.ndarray:
    """Letter with images i.i.d. from pmf, via inverse CDF on the cumulative weights."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if pmf.n != n:
        raise ValueError(f"pmf has {pmf.n} weights, automaton has {n} states")
    nf = rng.next_float
    u = np.array([nf() for _ in range(n)], dtype=np.float64)
    return _frozen_table(np.searchsorted(pmf._cum, u, side="right"))


def random_permutation(n: int, rng: Xoshiro256StarStar) -> np.ndarray:
    """Uniform permutation letter via Fisher-Yates with unbiased index draws."""
    if n < 1:
        raise ValueError("n must be >= 1")
    perm = list(range(n))
    nb = rng.next_below
    for i in range(n - 1, 0, -1):
        j = nb(i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    return _frozen_table(perm)
