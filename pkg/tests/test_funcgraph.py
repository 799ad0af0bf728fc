"""Functional-graph profiles against per-state brute force."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from synclab import (
    Xoshiro256StarStar,
    analyze_mapping,
    apply_word,
    Automaton,
    contraction_budget,
    lemma1_event,
    lemma1_threshold,
    random_mapping,
)

import oracles


@st.composite
def mappings(draw, max_n=32):
    n = draw(st.integers(1, max_n))
    return draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))


class TestAnalyzeMapping:
    def test_two_cycle_with_tail(self):
        profile = analyze_mapping([1, 0, 0, 2])
        assert profile.cyclic_points.tolist() == [0, 1]
        assert profile.heights.tolist() == [0, 0, 1, 2]
        assert profile.max_height == 2
        assert profile.merging_pair == (1, 2)   # both map to 0

    def test_identity(self):
        profile = analyze_mapping([0, 1, 2])
        assert profile.cyclic_points.tolist() == [0, 1, 2]
        assert profile.heights.tolist() == [0, 0, 0]
        assert profile.max_height == 0
        assert profile.merging_pair is None

    def test_constant(self):
        profile = analyze_mapping([0, 0, 0, 0])
        assert profile.cyclic_points.tolist() == [0]
        assert profile.heights.tolist() == [0, 1, 1, 1]
        assert profile.max_height == 1
        assert profile.merging_pair == (0, 1)

    def test_rejects_bad_entries(self):
        with pytest.raises(ValueError):
            analyze_mapping([0, 3])

    def test_agrees_with_brute_force_on_200_random_mappings(self):
        rng = Xoshiro256StarStar(1001)
        for _ in range(200):
            n = 1 + rng.next_below(64)
            table = random_mapping(n, rng)
            profile = analyze_mapping(table)
            cyclic, heights, max_h, merging = oracles.mapping_profile(table.tolist())
            assert set(profile.cyclic_points.tolist()) == cyclic
            assert profile.heights.tolist() == heights
            assert profile.max_height == max_h
            assert profile.merging_pair == merging

    @given(mappings())
    def test_heights_decrease_along_edges(self, table):
        profile = analyze_mapping(table)
        for s, h in enumerate(profile.heights):
            if h > 0:
                assert profile.heights[table[s]] == h - 1

    @given(mappings())
    def test_zero_height_iff_cyclic(self, table):
        profile = analyze_mapping(table)
        cyclic = set(profile.cyclic_points.tolist())
        for s, h in enumerate(profile.heights):
            assert (h == 0) == (s in cyclic)

    @given(mappings())
    def test_merging_pair_exists_iff_not_bijection(self, table):
        profile = analyze_mapping(table)
        is_bijection = sorted(table) == list(range(len(table)))
        assert (profile.merging_pair is None) == is_bijection
        if profile.merging_pair is not None:
            p1, p2 = profile.merging_pair
            assert p1 < p2 and table[p1] == table[p2]

    @given(mappings(), st.integers(0, 8))
    def test_image_stabilizes_to_cyclic_points(self, table, extra):
        profile = analyze_mapping(table)
        aut = Automaton.from_tables([table])
        word = [0] * (profile.max_height + extra)
        got = apply_word(aut, word, range(aut.n))
        assert got.tolist() == profile.cyclic_points.tolist()


class TestThresholdEvent:
    def test_small_tree_false(self):
        # n=4: threshold 2*sqrt(4 ln 4) ~ 4.71; 2 cyclic points, height 2
        assert math.isclose(lemma1_threshold(4), 4.7096, abs_tol=1e-3)
        assert not lemma1_event([1, 0, 0, 2])

    def test_constant_mapping_false(self):
        assert not lemma1_event([0, 0, 0, 0])

    def test_identity_n16_true(self):
        # threshold 2*sqrt(16 ln 16) ~ 13.32 < 16 cyclic points
        assert math.isclose(lemma1_threshold(16), 13.3216, abs_tol=1e-3)
        assert lemma1_event(list(range(16)))


class TestContractionBudget:
    def test_n1(self):
        assert contraction_budget(1) == 0

    def test_n100(self):
        assert contraction_budget(100) == 43

    def test_n3(self):
        assert contraction_budget(3) == 4

    @given(st.integers(2, 10_000))
    def test_matches_formula(self, n):
        assert contraction_budget(n) == math.ceil(2 * math.sqrt(n * math.log(n)))

    @given(st.integers(2, 10_000))
    def test_budget_covers_typical_heights(self, n):
        # ceiling keeps the contraction guarantee conservative
        assert contraction_budget(n) >= 2 * math.sqrt(n * math.log(n))
