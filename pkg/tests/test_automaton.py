"""Core automaton behavior against hand evaluation and format round trips."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from synclab import (
    Automaton,
    AutomatonFormatError,
    apply_letter,
    apply_word,
    format_word,
    is_synchronizing_word,
    parse,
    parse_word,
    serialize,
)

import oracles

CERNY4 = Automaton.from_tables([[1, 2, 3, 0], [1, 1, 2, 3]])


@st.composite
def automata(draw, max_n=8, max_k=3):
    n = draw(st.integers(1, max_n))
    k = draw(st.integers(1, max_k))
    tables = [draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))
              for _ in range(k)]
    return Automaton.from_tables(tables)


@st.composite
def automata_with_word(draw):
    aut = draw(automata())
    word = draw(st.lists(st.integers(0, aut.k - 1), max_size=12))
    return aut, word


class TestConstruction:
    def test_basic_fields(self):
        aut = Automaton.from_tables([[2, 2, 0], [1, 2, 0]])
        assert aut.n == 3 and aut.k == 2

    def test_rejects_out_of_range_entry(self):
        with pytest.raises(ValueError):
            Automaton.from_tables([[0, 3, 1]])

    def test_rejects_ragged_letters(self):
        with pytest.raises(ValueError):
            Automaton(n=3, letters=([0, 1, 2], [0, 1]))

    def test_rejects_empty_alphabet(self):
        with pytest.raises(ValueError):
            Automaton(n=2, letters=())

    def test_tables_frozen(self):
        aut = Automaton.from_tables([[0, 1]])
        with pytest.raises(ValueError):
            aut.letters[0][0] = 1

    def test_is_permutation(self):
        aut = Automaton.from_tables([[1, 2, 0], [0, 0, 1]])
        assert aut.is_permutation(0)
        assert not aut.is_permutation(1)


class TestApplyLetter:
    def test_table_lookup(self):
        aut = Automaton.from_tables([[2, 2, 0]])
        assert apply_letter(aut, 0, 1) == 2

    def test_identity_letter(self):
        aut = Automaton.from_tables([[0, 1, 2]])
        assert apply_letter(aut, 0, 1) == 1

    def test_rotation(self):
        aut = Automaton.from_tables([[1, 2, 3, 0]])
        assert apply_letter(aut, 0, 3) == 0

    def test_rejects_bad_indices(self):
        aut = Automaton.from_tables([[0, 1]])
        with pytest.raises(ValueError):
            apply_letter(aut, 1, 0)
        with pytest.raises(ValueError):
            apply_letter(aut, 0, 2)


class TestApplyWord:
    def test_single_letter_image(self):
        aut = Automaton.from_tables([[2, 2, 0]])
        assert apply_word(aut, [0], {0, 1, 2}).tolist() == [0, 2]

    def test_empty_word_is_identity(self):
        aut = Automaton.from_tables([[1, 0]])
        assert apply_word(aut, [], {0, 1}).tolist() == [0, 1]

    def test_two_step_walk(self):
        aut = Automaton.from_tables([[1, 2, 0]])
        assert apply_word(aut, [0, 0], {0}).tolist() == [2]

    def test_rejects_bad_word(self):
        aut = Automaton.from_tables([[0, 1]])
        with pytest.raises(ValueError):
            apply_word(aut, [2], {0})

    def test_rejects_bad_state(self):
        aut = Automaton.from_tables([[0, 1]])
        with pytest.raises(ValueError):
            apply_word(aut, [0], {5})

    @given(automata_with_word())
    def test_matches_pointwise_walk(self, aut_word):
        aut, word = aut_word
        tables = [t.tolist() for t in aut.letters]
        got = set(apply_word(aut, word, range(aut.n)).tolist())
        assert got == oracles.image(tables, word, range(aut.n))

    @given(automata_with_word())
    def test_cardinality_never_grows(self, aut_word):
        aut, word = aut_word
        size = aut.n
        current = np.arange(aut.n)
        for letter in word:
            current = apply_word(aut, [letter], current)
            assert current.size <= size
            size = current.size

    @given(automata_with_word(), st.integers(0, 12))
    def test_split_composition(self, aut_word, cut):
        aut, word = aut_word
        cut = min(cut, len(word))
        whole = apply_word(aut, word, range(aut.n))
        tail = apply_word(aut, word[cut:], apply_word(aut, word[:cut], range(aut.n)))
        assert np.array_equal(whole, tail)

    @given(automata())
    def test_permutation_letters_preserve_cardinality(self, aut):
        for letter in range(aut.k):
            if aut.is_permutation(letter):
                for subset in ([0], list(range(aut.n)), list(range(aut.n // 2 + 1))):
                    assert apply_word(aut, [letter], subset).size == len(set(subset))


class TestSynchronizingWord:
    def test_cerny4_witness(self):
        word = [1, 0, 0, 0, 1, 0, 0, 0, 1]
        # independent check: walk the table per state
        tables = [t.tolist() for t in CERNY4.letters]
        assert oracles.image(tables, word, range(4)) == {1}
        assert is_synchronizing_word(CERNY4, word)

    def test_single_state_empty_word(self):
        aut = Automaton.from_tables([[0]])
        assert is_synchronizing_word(aut, [])

    @given(st.data())
    def test_permutation_letters_never_synchronize(self, data):
        n = data.draw(st.integers(2, 6))
        rng_perm = data.draw(st.permutations(range(n)))
        word = data.draw(st.lists(st.integers(0, 1), max_size=10))
        aut = Automaton.from_tables([list(rng_perm), list(range(n))])
        assert not is_synchronizing_word(aut, word)


class TestTextFormat:
    def test_documented_example(self):
        aut = parse("3 2\n2 2 0\n1 2 0\n")
        assert aut.n == 3
        assert [t.tolist() for t in aut.letters] == [[2, 2, 0], [1, 2, 0]]

    def test_out_of_range_entry_message(self):
        with pytest.raises(AutomatonFormatError, match="entry 5 out of range on line 2"):
            parse("3 1\n2 5 0\n")

    def test_malformed_header(self):
        with pytest.raises(AutomatonFormatError, match="line 1"):
            parse("3\n0 0 0\n")

    def test_wrong_row_length(self):
        with pytest.raises(AutomatonFormatError, match="expected 3 entries on line 2"):
            parse("3 1\n0 1\n")

    def test_wrong_row_count(self):
        with pytest.raises(AutomatonFormatError, match="expected 2 letter rows"):
            parse("2 2\n0 1\n")

    def test_non_integer_entry(self):
        with pytest.raises(AutomatonFormatError, match="line 2"):
            parse("2 1\n0 x\n")

    @given(automata())
    def test_round_trip(self, aut):
        text = serialize(aut)
        assert parse(text) == aut
        assert serialize(parse(text)) == text


class TestWordFiles:
    def test_round_trip(self):
        assert parse_word(format_word([1, 0, 2])) == [1, 0, 2]

    def test_empty_file_is_empty_word(self):
        assert parse_word("") == []
        assert format_word([]) == ""

    def test_bad_token(self):
        with pytest.raises(AutomatonFormatError):
            parse_word("0 one 2")
