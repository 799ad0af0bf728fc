"""Seeded batch experiments over grids of n, with deterministic CSV output.

Each (n, trial) cell derives its own seed from the master seed, generates the
configured alphabet, runs the requested measurements, and verifies any word it
reports.  Output rows are sorted by (n, trial, measurement), so the CSV is
byte-identical no matter how many workers ran the batch.  Wall-clock timings
are kept in the records but written to CSV only on request, because they are
the one field that would break that guarantee.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .automaton import Automaton, is_synchronizing_word
from .funcgraph import analyze_mapping, lemma1_threshold
from .pairgraph import EXACT_DIAMETER_MAX_N, pair_diameter
from .rng import Pmf, Xoshiro256StarStar, derive_trial_seed, random_mapping, \
    random_p_mapping, random_permutation
from .synthesis import RoleAssignment, SynthesisFailure, constructive_synchronize, \
    exact_reset_threshold, greedy_synchronize

MEASUREMENTS = ("constructive", "greedy", "exact", "lemma1", "diameter")

FAILURE_CODES = {
    "routing": -1,
    "no-merge": -2,
    "not-synchronizing": -3,
    "too-large": -4,
}

CSV_COMMENT = ("# word_length failure codes: -1=routing -2=no-merge "
               "-3=not-synchronizing -4=too-large; empty=not-applicable")
CSV_HEADER = ("n,trial,seed,algorithm,word_length,synchronized,cyclic_count,"
              "max_height,lemma1_event,max_route_len,elapsed_ms")


class FitUnavailableError(ValueError):
    """Not enough grid points with successful trials to fit an exponent."""


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Grid, trial count, master seed, alphabet and measurements of one batch.

    Alphabet tokens: 'm' uniform mapping, 'p' uniform permutation,
    'g:<pmf-file>' mapping with images drawn from the file's distribution.
    """

    n_grid: tuple
    trials_per_n: int
    master_seed: int
    alphabet_spec: tuple = ("m", "p", "p")
    measurements: tuple = ("constructive",)
    exact_cap: int = 20
    diameter_sample: int = 10_000

    def __post_init__(self):
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        object.__setattr__(self, "alphabet_spec", tuple(self.alphabet_spec))
        object.__setattr__(self, "measurements", tuple(self.measurements))
        if not self.n_grid or any(n < 1 for n in self.n_grid):
            raise ConfigError("n_grid needs at least one n >= 1")
        if len(set(self.n_grid)) != len(self.n_grid):
            raise ConfigError("n_grid entries must be distinct")
        if self.trials_per_n < 1:
            raise ConfigError("trials_per_n must be >= 1")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if not self.measurements:
            raise ConfigError("at least one measurement is required")
        for m in self.measurements:
            if m not in MEASUREMENTS:
                raise ConfigError(f"unknown measurement {m!r}")
        for tok in self.alphabet_spec:
            if tok not in ("m", "p") and not tok.startswith("g:"):
                raise ConfigError(f"unknown alphabet token {tok!r}")
        kinds = [t if t in ("m", "p") else "g" for t in self.alphabet_spec]
        if "constructive" in self.measurements:
            if kinds.count("m") < 1 or kinds.count("p") < 2:
                raise ConfigError("constructive needs >= 1 mapping and >= 2 permutation letters")
        if "lemma1" in self.measurements and kinds.count("m") + kinds.count("g") < 1:
            raise ConfigError("lemma1 needs a mapping or p-mapping letter")
        if "diameter" in self.measurements and kinds.count("p") < 2:
            raise ConfigError("diameter needs >= 2 permutation letters")
        if not 1 <= self.exact_cap <= 24:
            raise ConfigError("exact_cap must be in [1, 24]")
        if self.diameter_sample < 1:
            raise ConfigError("diameter_sample must be >= 1")


def parse_config(text: str) -> ExperimentConfig:
    """Flat key=value lines: n_grid, trials, seed, alphabet, measure,
    exact_cap, diameter_sample.  '#' lines and blanks are ignored."""
    values = {}
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"expected key=value on line {lineno}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    known = {"n_grid", "trials", "seed", "alphabet", "measure", "exact_cap",
             "diameter_sample"}
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for required in ("n_grid", "trials", "seed"):
        if required not in values:
            raise ConfigError(f"missing config key {required!r}")
    try:
        kwargs = dict(
            n_grid=tuple(int(tok) for tok in values["n_grid"].split(",") if tok),
            trials_per_n=int(values["trials"]),
            master_seed=int(values["seed"]),
        )
    except ValueError as exc:
        raise ConfigError(f"bad numeric config value: {exc}") from None
    if "alphabet" in values:
        kwargs["alphabet_spec"] = tuple(t for t in values["alphabet"].split(",") if t)
    if "measure" in values:
        kwargs["measurements"] = tuple(t for t in values["measure"].split(",") if t)
    if "exact_cap" in values:
        kwargs["exact_cap"] = int(values["exact_cap"])
    if "diameter_sample" in values:
        kwargs["diameter_sample"] = int(values["diameter_sample"])
    return ExperimentConfig(**kwargs)


@dataclass
class TrialRecord:
    """One measurement outcome; None means not applicable to this row."""

    n: int
    trial: int
    seed: int
    algorithm: str
    word_length: int | None = None
    synchronized: bool | None = None
    cyclic_count: int | None = None
    max_height: int | None = None
    lemma1_event: bool | None = None
    max_route_len: int | None = None
    elapsed_ms: int = 0


_PMF_CACHE: dict = {}


def _pmf(path: str) -> Pmf:
    if path not in _PMF_CACHE:
        _PMF_CACHE[path] = Pmf.from_file(path)
    return _PMF_CACHE[path]


def _generate_letters(cfg: ExperimentConfig, n: int, rng: Xoshiro256StarStar) -> list:
    letters = []
    for tok in cfg.alphabet_spec:
        if tok == "m":
            letters.append(random_mapping(n, rng))
        elif tok == "p":
            letters.append(random_permutation(n, rng))
        else:
            letters.append(random_p_mapping(n, _pmf(tok[2:]), rng))
    return letters


def run_trial(cfg: ExperimentConfig, n: int, trial: int) -> list:
    """All measurement records for one grid cell, in canonical order."""
    seed = derive_trial_seed(cfg.master_seed, n, trial)
    rng = Xoshiro256StarStar(seed)
    aut = Automaton(n=n, letters=tuple(_generate_letters(cfg, n, rng)))

    kinds = [t if t in ("m", "p") else "g" for t in cfg.alphabet_spec]
    perm_indices = [i for i, k in enumerate(kinds) if k == "p"]
    mapping_index = next((i for i, k in enumerate(kinds) if k == "m"), None)
    profile_index = next((i for i, k in enumerate(kinds) if k in ("m", "g")), None)

    profile = None
    if profile_index is not None and ({"constructive", "lemma1"} & set(cfg.measurements)):
        profile = analyze_mapping(aut.letters[profile_index])

    def profile_fields(record: TrialRecord) -> TrialRecord:
        if profile is None:
            return record
        threshold = lemma1_threshold(n)
        return replace(
            record,
            cyclic_count=profile.cyclic_count,
            max_height=profile.max_height,
            lemma1_event=bool(profile.cyclic_count > threshold
                              or profile.max_height > threshold),
        )

    records = []
    for measurement in MEASUREMENTS:
        if measurement not in cfg.measurements:
            continue
        started = time.perf_counter()
        rec = TrialRecord(n=n, trial=trial, seed=seed, algorithm=measurement)

        if measurement in ("constructive", "greedy", "exact"):
            try:
                if measurement == "constructive":
                    roles = RoleAssignment(mapping_index,
                                           (perm_indices[0], perm_indices[1]))
                    result = constructive_synchronize(aut, roles)
                    word = result.word
                    rec.max_route_len = result.max_route_len
                elif measurement == "greedy":
                    result = greedy_synchronize(aut)
                    word = result.word
                    rec.max_route_len = result.max_route_len
                else:
                    length, word = exact_reset_threshold(aut, cap_n=cfg.exact_cap)
                rec.word_length = len(word)
                rec.synchronized = bool(is_synchronizing_word(aut, word))
            except SynthesisFailure as failure:
                rec.word_length = FAILURE_CODES[failure.kind]
                rec.synchronized = False
            if measurement == "constructive":
                rec = profile_fields(rec)
        elif measurement == "lemma1":
            rec = profile_fields(rec)
        else:  # diameter
            sample = None if n <= EXACT_DIAMETER_MAX_N else cfg.diameter_sample
            if n == 1:
                diameter = 0
            else:
                diameter = pair_diameter(aut, (perm_indices[0], perm_indices[1]),
                                         sample=sample, rng=rng)
            rec.max_route_len = None if math.isinf(diameter) else int(diameter)

        rec.elapsed_ms = int(round((time.perf_counter() - started) * 1000))
        records.append(rec)
    return records


def _trial_task(args):
    cfg, n, trial = args
    return run_trial(cfg, n, trial)


def run_experiment(cfg: ExperimentConfig, jobs: int = 1) -> list:
    """Run the whole grid; per-trial failures land in their rows, never abort.

    Output is sorted by (n, trial) regardless of the execution schedule.
    """
    tasks = sorted((n, t) for n in cfg.n_grid for t in range(cfg.trials_per_n))
    if jobs <= 1:
        groups = [run_trial(cfg, n, t) for n, t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            groups = list(pool.map(_trial_task, [(cfg, n, t) for n, t in tasks],
                                   chunksize=1))
    return [rec for group in groups for rec in group]


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def records_to_csv(records, timings: bool = False) -> str:
    """Render records in canonical CSV form.

    elapsed_ms is zeroed unless timings=True: wall-clock times are the one
    field that would break byte-identical replays.
    """
    lines = [CSV_COMMENT, CSV_HEADER]
    for r in records:
        lines.append(",".join([
            str(r.n), str(r.trial), str(r.seed), r.algorithm,
            _cell(r.word_length), _cell(r.synchronized), _cell(r.cyclic_count),
            _cell(r.max_height), _cell(r.lemma1_event), _cell(r.max_route_len),
            str(r.elapsed_ms if timings else 0),
        ]))
    return "\n".join(lines) + "\n"


def _parse_cell(text: str):
    if text == "":
        return None
    if text == "true":
        return True
    if text == "false":
        return False
    return int(text)


def parse_records_csv(text: str) -> list:
    """Read back records_to_csv output (comment and header lines skipped)."""
    records = []
    for line in text.split("\n"):
        if not line or line.startswith("#") or line.startswith("n,"):
            continue
        parts = line.split(",")
        if len(parts) != 11:
            raise ValueError(f"bad record line: {line!r}")
        records.append(TrialRecord(
            n=int(parts[0]), trial=int(parts[1]), seed=int(parts[2]),
            algorithm=parts[3], word_length=_parse_cell(parts[4]),
            synchronized=_parse_cell(parts[5]), cyclic_count=_parse_cell(parts[6]),
            max_height=_parse_cell(parts[7]), lemma1_event=_parse_cell(parts[8]),
            max_route_len=_parse_cell(parts[9]), elapsed_ms=int(parts[10]),
        ))
    return records


def _successful_lengths(records) -> dict:
    by_n: dict = {}
    for r in records:
        if r.synchronized and r.word_length is not None and r.word_length >= 0:
            by_n.setdefault(r.n, []).append(r.word_length)
    return by_n


def fit_exponent(records) -> tuple:
    """OLS of ln(median word_length) against ln(n).

    Returns (slope, intercept, residual) with residual the RMS of the fit
    residuals.  Needs at least 3 distinct n with a successful trial and a
    positive median length.
    """
    by_n = _successful_lengths(records)
    points = [(n, float(np.median(v))) for n, v in sorted(by_n.items())]
    points = [(n, med) for n, med in points if med > 0]
    if len(points) < 3:
        raise FitUnavailableError("fit needs >= 3 grid points with successful trials")
    x = np.log([n for n, _ in points])
    y = np.log([med for _, med in points])
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return float(slope), float(intercept), residual


@dataclass
class NSummary:
    n: int
    trials: int
    successes: int
    success_rate: float
    median_length: float | None
    q25: float | None
    q75: float | None
    lemma1_rate: float | None
    normalized_length: float | None      # median / sqrt(n * ln^3 n)


@dataclass
class ExperimentSummary:
    per_n: list
    fit: tuple | None                    # (slope, intercept, residual)
    fitted_c: float | None               # max over rows of max_route_len / ln n


def summarize(records) -> ExperimentSummary:
    """Per-n frequencies and quantiles, the scaling fit, and the routing
    constant estimate."""
    if not records:
        raise ValueError("summarize needs at least one record")
    per_n = []
    for n in sorted({r.n for r in records}):
        rows = [r for r in records if r.n == n]
        attempted = [r for r in rows if r.synchronized is not None]
        successes = [r for r in attempted if r.synchronized]
        lengths = [r.word_length for r in successes
                   if r.word_length is not None and r.word_length >= 0]
        lemma1 = [r.lemma1_event for r in rows if r.lemma1_event is not None]
        median = q25 = q75 = norm = None
        if lengths:
            q25, median, q75 = (float(q) for q in np.percentile(lengths, [25, 50, 75]))
            if n >= 2 and median > 0:
                norm = median / math.sqrt(n * math.log(n) ** 3)
        per_n.append(NSummary(
            n=n,
            trials=len(attempted),
            successes=len(successes),
            success_rate=(len(successes) / len(attempted)) if attempted else 1.0,
            median_length=median, q25=q25, q75=q75,
            lemma1_rate=(sum(lemma1) / len(lemma1)) if lemma1 else None,
            normalized_length=norm,
        ))
    try:
        fit = fit_exponent(records)
    except FitUnavailableError:
        fit = None
    ratios = [r.max_route_len / math.log(r.n) for r in records
              if r.max_route_len is not None and r.n >= 2]
    fitted_c = max(ratios) if ratios else None
    return ExperimentSummary(per_n=per_n, fit=fit, fitted_c=fitted_c)


def format_summary(summary: ExperimentSummary) -> str:
    """Plain whitespace table (gnuplot-friendly) with annotation comments."""
    out = ["# n trials successes p_hat median q25 q75 lemma1_rate norm_median"]
    for s in summary.per_n:
        out.append(" ".join([
            str(s.n), str(s.trials), str(s.successes), f"{s.success_rate:.4f}",
            _num(s.median_length), _num(s.q25), _num(s.q75),
            _num(s.lemma1_rate, "{:.4f}"), _num(s.normalized_length, "{:.4f}"),
        ]))
    if summary.fit is not None:
        slope, intercept, residual = summary.fit
        out.append(f"# fit: slope={slope:.4f} intercept={intercept:.4f} residual={residual:.4f}")
        out.append("# reference slopes from earlier numerical studies: "
                   "0.55 (Skvortsov-Tipikin), 0.50 (Kisielewicz et al.)")
    if summary.fitted_c is not None:
        out.append(f"# routing constant: max(route_len / ln n) = {summary.fitted_c:.4f}")
    return "\n".join(out) + "\n"


def _num(value, fmt: str = "{:.1f}") -> str:
    return "-" if value is None else fmt.format(value)
