"""Synchronizing words for random automata.

Library and CLI for building synchronizing words on automata with one mapping
letter and two permutation letters, measuring how the word length scales with
the state count, and cross-checking the supporting structure (functional-graph
profiles, permutation pair routing) against exact and brute-force oracles.
"""

from .automaton import (
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
from .experiments import (
    ConfigError,
    ExperimentConfig,
    ExperimentSummary,
    FitUnavailableError,
    TrialRecord,
    fit_exponent,
    format_summary,
    parse_config,
    parse_records_csv,
    records_to_csv,
    run_experiment,
    run_trial,
    summarize,
)
from .funcgraph import (
    MappingProfile,
    analyze_mapping,
    contraction_budget,
    lemma1_event,
    lemma1_threshold,
    preimage_csr,
)
from .pairgraph import (
    PairRoutingTable,
    PairUnreachableError,
    UNREACHABLE,
    build_routing_table,
    distance_histogram,
    invert_permutation,
    pair_count,
    pair_decode,
    pair_diameter,
    pair_index,
    route_pair,
)
from .rng import (
    Pmf,
    Xoshiro256StarStar,
    derive_trial_seed,
    random_mapping,
    random_p_mapping,
    random_permutation,
    splitmix64_mix,
)
from .synthesis import (
    RoleAssignment,
    SynthesisFailure,
    SynthesisResult,
    constructive_synchronize,
    exact_reset_threshold,
    greedy_synchronize,
    is_synchronizing,
)

__version__ = "0.1.0"
