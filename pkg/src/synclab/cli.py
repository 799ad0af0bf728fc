"""Command-line interface.

One machine-readable result line goes to stdout; diagnostics (word echoes,
progress) go to stderr.  Exit codes: 0 success, 1 domain failure (instance
not synchronizing, routing dead end, failed check), 2 usage error.  Every
randomized subcommand prints the resolved seed so the run can be replayed.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from .automaton import (
    Automaton,
    AutomatonFormatError,
    apply_word,
    format_word,
    parse,
    parse_word,
    serialize,
)
from .experiments import (
    ConfigError,
    FitUnavailableError,
    fit_exponent,
    format_summary,
    parse_config,
    parse_records_csv,
    records_to_csv,
    run_experiment,
    summarize,
)
from .funcgraph import analyze_mapping, lemma1_event
from .pairgraph import (
    EXACT_DIAMETER_MAX_N,
    PairUnreachableError,
    build_routing_table,
    distance_histogram,
    pair_diameter,
)
from .rng import Pmf, Xoshiro256StarStar, random_mapping, random_p_mapping, \
    random_permutation
from .synthesis import (
    ROUTING,
    RoleAssignment,
    SynthesisFailure,
    constructive_synchronize,
    exact_reset_threshold,
    greedy_synchronize,
)

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2


def letter_name(index: int) -> str:
    return chr(ord("a") + index) if index < 26 else f"l{index}"


def _read_automaton(path: str) -> Automaton:
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read())


def _read_word(path: str) -> list:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_word(fh.read())


def _parse_seed(value) -> int:
    if value is None:
        return int.from_bytes(os.urandom(8), "little")
    seed = int(value)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    return seed


def _echo_word(word) -> None:
    names = " ".join(letter_name(w) for w in word)
    indices = " ".join(str(w) for w in word)
    print(f"word (names): {names}", file=sys.stderr)
    print(f"word (indices): {indices}", file=sys.stderr)


def _write_word(path, word) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(format_word(word))


def cmd_gen(args) -> int:
    seed = _parse_seed(args.seed)
    tokens = [t for t in args.alphabet.split(",") if t]
    if not tokens:
        raise ValueError("alphabet must list at least one letter token")
    rng = Xoshiro256StarStar(seed)
    letters = []
    for tok in tokens:
        if tok == "m":
            letters.append(random_mapping(args.n, rng))
        elif tok == "p":
            letters.append(random_permutation(args.n, rng))
        elif tok.startswith("g:"):
            letters.append(random_p_mapping(args.n, Pmf.from_file(tok[2:]), rng))
        else:
            raise ValueError(f"unknown alphabet token {tok!r} (use m, p, or g:<pmf-file>)")
    aut = Automaton(n=args.n, letters=tuple(letters))
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(serialize(aut))
    print(f"seed={seed} n={aut.n} k={aut.k} out={args.out}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    aut = _read_automaton(args.infile)
    table = aut.letters[aut._check_letter(args.letter)]
    profile = analyze_mapping(table)
    merging = ("none" if profile.merging_pair is None
               else f"{profile.merging_pair[0]},{profile.merging_pair[1]}")
    event = "true" if lemma1_event(table) else "false"
    print(f"cyclic={profile.cyclic_count} height={profile.max_height} "
          f"merging={merging} lemma1_event={event}")
    return EXIT_OK


def cmd_pairs(args) -> int:
    aut = _read_automaton(args.infile)
    perms = tuple(int(tok) for tok in args.perms.split(","))
    if len(perms) != 2:
        raise ValueError("--perms needs exactly two letter indices i,j")
    if args.target is not None:
        u, v = (int(tok) for tok in args.target.split(","))
        table = build_routing_table(aut, perms, (u, v))
        counts, unreachable = distance_histogram(table)
        print("distance,count")
        for d, c in enumerate(counts):
            if c:
                print(f"{d},{int(c)}")
        if unreachable:
            print(f"unreachable,{unreachable}")
        return EXIT_OK
    if args.sample is not None:
        seed = _parse_seed(args.seed)
        diameter = pair_diameter(aut, perms, sample=args.sample,
                                 rng=Xoshiro256StarStar(seed))
        suffix = f" sample={args.sample} seed={seed}"
    else:
        if aut.n > EXACT_DIAMETER_MAX_N:
            raise ValueError(
                f"exact diameter is capped at n={EXACT_DIAMETER_MAX_N}; pass --sample k")
        diameter = pair_diameter(aut, perms)
        suffix = ""
    if math.isinf(diameter):
        print(f"diameter=inf{suffix}")
        return EXIT_DOMAIN
    print(f"diameter={int(diameter)}{suffix}")
    return EXIT_OK


def _parse_roles(text: str) -> RoleAssignment:
    parts = dict(item.split("=", 1) for item in text.split(",") if item)
    missing = {"a", "b", "c"} - set(parts)
    if missing:
        raise ValueError(f"--roles must assign a=, b=, c= (missing {sorted(missing)})")
    return RoleAssignment(int(parts["a"]), (int(parts["b"]), int(parts["c"])))


def cmd_sync(args) -> int:
    aut = _read_automaton(args.infile)
    if args.algo == "constructive":
        roles = _parse_roles(args.roles)
        try:
            result = constructive_synchronize(aut, roles)
        except SynthesisFailure as failure:
            if failure.kind == ROUTING and args.fallback == "greedy":
                print(f"routing failed ({failure}); falling back to greedy",
                      file=sys.stderr)
                result = greedy_synchronize(aut)
                _write_word(args.out, result.word)
                _echo_word(result.word)
                print(f"len={len(result.word)} rounds={result.iterations} "
                      f"max_route={result.max_route_len} bound={result.bound_value} "
                      f"fallback=greedy")
                return EXIT_OK
            raise
    elif args.algo == "greedy":
        result = greedy_synchronize(aut)
    else:
        length, word = exact_reset_threshold(aut, cap_n=args.cap)
        _write_word(args.out, word)
        _echo_word(word)
        print(f"len={length}")
        return EXIT_OK
    _write_word(args.out, result.word)
    _echo_word(result.word)
    print(f"len={len(result.word)} rounds={result.iterations} "
          f"max_route={result.max_route_len} bound={result.bound_value}")
    return EXIT_OK


def cmd_check(args) -> int:
    aut = _read_automaton(args.infile)
    word = _read_word(args.word)
    image = apply_word(aut, word, range(aut.n))
    if image.size == 1:
        print(f"synchronized=true set_size=1 state={int(image[0])}")
        return EXIT_OK
    print(f"synchronized=false set_size={image.size}")
    return EXIT_DOMAIN


def cmd_exact(args) -> int:
    aut = _read_automaton(args.infile)
    cap = 24 if args.force else min(args.cap, 20)
    length, word = exact_reset_threshold(aut, cap_n=cap)
    _write_word(args.out, word)
    _echo_word(word)
    print(f"len={length}")
    return EXIT_OK


def cmd_experiment(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        cfg = parse_config(fh.read())
    print(f"seed={cfg.master_seed} grid={','.join(str(n) for n in cfg.n_grid)} "
          f"trials={cfg.trials_per_n} jobs={args.jobs}", file=sys.stderr)
    records = run_experiment(cfg, jobs=args.jobs)
    csv_text = records_to_csv(records, timings=args.timings)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(csv_text)
        print(f"rows={len(records)} out={args.out}")
        if args.summary:
            sys.stdout.write(format_summary(summarize(records)))
    else:
        sys.stdout.write(csv_text)
        if args.summary:
            sys.stderr.write(format_summary(summarize(records)))
    return EXIT_OK


def cmd_fit(args) -> int:
    with open(args.csv, "r", encoding="utf-8") as fh:
        records = parse_records_csv(fh.read())
    if args.algo:
        records = [r for r in records if r.algorithm == args.algo]
    if not records:
        print("no records match", file=sys.stderr)
        return EXIT_DOMAIN
    summary = summarize(records)
    try:
        slope, intercept, residual = fit_exponent(records)
    except FitUnavailableError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_DOMAIN
    print(f"slope={slope:.6f} intercept={intercept:.6f} residual={residual:.6f}")
    sys.stdout.write(format_summary(summary))
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="synclab",
        description="Synchronizing words for random automata: generation, "
                    "analysis, synthesis, experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random automaton file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alphabet", required=True,
                   help="comma list of letter tokens: m, p, or g:<pmf-file>")
    p.add_argument("--seed", help="unsigned 64-bit seed (default: OS entropy)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("analyze", help="profile one letter's functional graph")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--letter", type=int, default=0)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("pairs", help="pair-graph diameter or distance histogram")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--perms", required=True, help="two permutation letter indices i,j")
    p.add_argument("--target", help="pair u,v: print the distance histogram CSV")
    p.add_argument("--sample", type=int, help="sampled diameter with this many draws")
    p.add_argument("--seed", help="seed for sampled mode")
    p.set_defaults(func=cmd_pairs)

    p = sub.add_parser("sync", help="synthesize a synchronizing word")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--algo", choices=("constructive", "greedy", "exact"),
                   default="constructive")
    p.add_argument("--roles", default="a=0,b=1,c=2",
                   help="constructive roles, e.g. a=0,b=1,c=2")
    p.add_argument("--fallback", choices=("greedy",),
                   help="fall back to greedy on a routing failure")
    p.add_argument("--cap", type=int, default=20, help="exact solver size cap")
    p.add_argument("--out", help="write the word file here")
    p.set_defaults(func=cmd_sync)

    p = sub.add_parser("check", help="verify a word file against an automaton")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--word", required=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("exact", help="exact reset threshold via subset BFS")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--cap", type=int, default=20)
    p.add_argument("--force", action="store_true", help="raise the cap to the hard max 24")
    p.add_argument("--out", help="write the witness word file here")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("experiment", help="run a seeded experiment batch")
    p.add_argument("--config", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="CSV output path (default: stdout)")
    p.add_argument("--timings", action="store_true",
                   help="include wall-clock timings (breaks byte-identical replay)")
    p.add_argument("--summary", action="store_true")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("fit", help="scaling fit and summary table from a CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--algo", default="constructive",
                   help="restrict to one algorithm column value ('' for all)")
    p.set_defaults(func=cmd_fit)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (AutomatonFormatError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PairUnreachableError as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except SynthesisFailure as exc:
        print(f"failure[{exc.kind}]: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    raise SystemExit(main())
