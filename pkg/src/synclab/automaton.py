"""Automaton representation, word application, synchronization check, text I/O.

States are 0-based indices.  Letters are total transition tables stored as
read-only numpy int32 arrays.  A state set is handled throughout as a sorted
array of distinct state indices, which keeps set images cheap (one gather plus
a dedup) even for the large instances the experiments run on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class AutomatonFormatError(ValueError):
    """Malformed automaton or word text."""


@dataclass(frozen=True, eq=False)
class Automaton:
    """Complete deterministic automaton: n states and k total letter tables.

    Immutable after construction; safe to share across workers.
    """

    n: int
    letters: tuple

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("automaton needs n >= 1 states")
        tables = []
        for i, raw in enumerate(self.letters):
            table = np.asarray(raw, dtype=np.int32)
            if table.ndim != 1 or table.size != self.n:
                raise ValueError(f"letter {i} must have exactly {self.n} entries")
            if table.size and (int(table.min()) < 0 or int(table.max()) >= self.n):
                raise ValueError(f"letter {i} has an entry out of range [0, {self.n})")
            table = table.copy()
            table.setflags(write=False)
            tables.append(table)
        if not tables:
            raise ValueError("automaton needs at least one letter")
        object.__setattr__(self, "letters", tuple(tables))

    @classmethod
    def from_tables(cls, tables) -> "Automaton":
        tables = list(tables)
        if not tables:
            raise ValueError("automaton needs at least one letter")
        return cls(n=len(tables[0]), letters=tuple(tables))

    @property
    def k(self) -> int:
        return len(self.letters)

    def is_permutation(self, letter: int) -> bool:
        """True when the letter's table is a bijection on the states."""
        table = self.letters[self._check_letter(letter)]
        return int(np.bincount(table, minlength=self.n).max()) == 1

    def _check_letter(self, letter: int) -> int:
        if not 0 <= letter < self.k:
            raise ValueError(f"letter index {letter} out of range [0, {self.k})")
        return letter

    def __eq__(self, other):
        if not isinstance(other, Automaton):
            return NotImplemented
        return self.n == other.n and len(self.letters) == len(other.letters) and all(
            np.array_equal(a, b) for a, b in zip(self.letters, other.letters)
        )


def _check_word(aut: Automaton, word) -> list:
    word = list(word)
    if word and not all(0 <= int(w) < aut.k for w in word):
        raise ValueError(f"word contains a letter index outside [0, {aut.k})")
    return word


def _as_state_set(aut: Automaton, states) -> np.ndarray:
    if isinstance(states, np.ndarray):
        arr = states.astype(np.int32, copy=False)
    else:
        arr = np.fromiter((int(s) for s in states), dtype=np.int32)
    if arr.size and (int(arr.min()) < 0 or int(arr.max()) >= aut.n):
        raise ValueError(f"state set contains a state outside [0, {aut.n})")
    return np.unique(arr)


def apply_letter(aut: Automaton, letter: int, state: int) -> int:
    """Destination of a single state under one letter."""
    aut._check_letter(letter)
    if not 0 <= state < aut.n:
        raise ValueError(f"state {state} out of range [0, {aut.n})")
    return int(aut.letters[letter][state])


def apply_word(aut: Automaton, word, states) -> np.ndarray:
    """Image of a state set under a word, letters applied left to right.

    Returns a sorted array of distinct states; its size never exceeds the
    input's.  The empty word is the identity.
    """
    word = _check_word(aut, word)
    current = _as_state_set(aut, states)
    for letter in word:
        current = np.unique(aut.letters[letter][current])
    return current


def is_synchronizing_word(aut: Automaton, word) -> bool:
    """True when the word maps every state to one common state."""
    return apply_word(aut, word, np.arange(aut.n, dtype=np.int32)).size == 1


def serialize(aut: Automaton) -> str:
    """Canonical text form: 'n k' header, then one row of n entries per letter."""
    lines = [f"{aut.n} {aut.k}"]
    for table in aut.letters:
        lines.append(" ".join(str(int(v)) for v in table))
    return "\n".join(lines) + "\n"


def parse(text: str) -> Automaton:
    """Parse the canonical text form; serialize(parse(text)) == text."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise AutomatonFormatError("empty automaton text")
    header = lines[0].split(" ")
    if len(header) != 2:
        raise AutomatonFormatError("malformed header on line 1: expected 'n k'")
    try:
        n, k = int(header[0]), int(header[1])
    except ValueError:
        raise AutomatonFormatError("malformed header on line 1: expected 'n k'") from None
    if n < 1 or k < 1:
        raise AutomatonFormatError("malformed header on line 1: n and k must be >= 1")
    if len(lines) != 1 + k:
        raise AutomatonFormatError(f"expected {k} letter rows, got {len(lines) - 1}")
    tables = []
    for i in range(k):
        lineno = i + 2
        row = lines[1 + i].split(" ")
        if row == [""]:
            row = []
        if len(row) != n:
            raise AutomatonFormatError(f"expected {n} entries on line {lineno}, got {len(row)}")
        entries = []
        for tok in row:
            try:
                value = int(tok)
            except ValueError:
                raise AutomatonFormatError(f"invalid entry {tok!r} on line {lineno}") from None
            if not 0 <= value < n:
                raise AutomatonFormatError(f"entry {value} out of range on line {lineno}")
            entries.append(value)
        tables.append(entries)
    return Automaton(n=n, letters=tuple(tables))


def format_word(word) -> str:
    """Word file form: one line of space-separated letter indices."""
    word = list(word)
    if not word:
        return ""
    return " ".join(str(int(w)) for w in word) + "\n"


def parse_word(text: str) -> list:
    """Parse a word file; an empty file is the empty word."""
    stripped = text.strip()
    if not stripped:
        return []
    try:
        return [int(tok) for tok in stripped.split()]
    except ValueError as exc:
        raise AutomatonFormatError(f"invalid word file: {exc}") from None
