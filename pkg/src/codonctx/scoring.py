"""Codon pair score tables, CPB evaluation and the effective number of codons."""

from __future__ import annotations

import math
import warnings
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import pairwise
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from .seqcore import (
    AMINO_ACIDS,
    CODON_INDEX,
    SENSE_CODONS,
    STANDARD_CODE,
    as_codons,
)

Pair = tuple[str, str]

# floor for unobserved pairs, in natural-log units
DEFAULT_FLOOR = -10.0


class TableError(ValueError):
    """Unreadable or inconsistent codon pair score table."""


@dataclass(frozen=True)
class CpsTable:
    """Ordered codon-pair scores ``(5' codon, 3' codon) -> CPS``.

    ``observed``/``expected`` are present for tables built from a corpus or
    read from a file carrying those columns. Pairs without an entry score
    ``default_score``. ``floored`` lists pairs whose score is the floor
    because they were never observed.
    """

    scores: Mapping[Pair, float]
    observed: Mapping[Pair, float] | None = None
    expected: Mapping[Pair, float] | None = None
    log_base: float = math.e
    source: str = ""
    default_score: float = 0.0
    floored: frozenset = frozenset()

    def __post_init__(self):
        for name in ("scores", "observed", "expected"):
            m = getattr(self, name)
            if m is None:
                continue
            for a, b in m:
                if a not in CODON_INDEX or b not in CODON_INDEX:
                    raise TableError(f"{a}{b} is not a sense-codon pair")
            object.__setattr__(self, name, MappingProxyType(dict(m)))
        object.__setattr__(self, "floored", frozenset(self.floored))

    def score(self, a: str, b: str) -> float:
        return self.scores.get((a, b), self.default_score)

    @property
    def has_counts(self) -> bool:
        return self.observed is not None

    @cached_property
    def matrix(self) -> np.ndarray:
        """61x61 score matrix indexed by :data:`CODON_INDEX`."""
        m = np.full((len(SENSE_CODONS), len(SENSE_CODONS)), float(self.default_score))
        for (a, b), s in self.scores.items():
            m[CODON_INDEX[a], CODON_INDEX[b]] = s
        m.flags.writeable = False
        return m

    def negated(self) -> "CpsTable":
        return CpsTable({k: -v for k, v in self.scores.items()}, log_base=self.log_base,
                        source=f"negated {self.source}".strip(),
                        default_score=-self.default_score)


@dataclass(frozen=True)
class PairCounts:
    """Raw corpus tallies backing a CPS table."""

    pairs: Mapping[Pair, int]
    codons: Mapping[str, int]
    amino_acid_pairs: Mapping[tuple[str, str], int]
    amino_acids: Mapping[str, int]
    total_codons: int

    @property
    def total_pairs(self) -> int:
        return sum(self.pairs.values())

    def scaled(self, k: int) -> "PairCounts":
        return PairCounts(
            {p: k * n for p, n in self.pairs.items()},
            {c: k * n for c, n in self.codons.items()},
            {p: k * n for p, n in self.amino_acid_pairs.items()},
            {a: k * n for a, n in self.amino_acids.items()},
            k * self.total_codons,
        )

    def expected_ratio(self, a: str, b: str) -> Fraction:
        """Expected count of pair ``ab`` under codon independence within its amino-acid pair.

        ``N_A * N_B / (N_X * N_Y) * N_XY`` as an exact fraction.
        """
        x, y = _aa(a), _aa(b)
        nxy = self.amino_acid_pairs.get((x, y), 0)
        if not nxy:
            return Fraction(0)
        return Fraction(self.codons.get(a, 0) * self.codons.get(b, 0) * nxy,
                        self.amino_acids[x] * self.amino_acids[y])

    def independence_expected(self, a: str, b: str) -> Fraction:
        """Expected count of pair ``ab`` from codon frequencies alone (no amino-acid-pair term)."""
        if not self.total_codons:
            return Fraction(0)
        return Fraction(self.codons.get(a, 0) * self.codons.get(b, 0) * self.total_pairs,
                        self.total_codons ** 2)


@dataclass(frozen=True)
class CodonUsage:
    """Synonymous codon usage per amino acid: ``{aa: (n_1, ..., n_k)}``."""

    per_amino_acid: Mapping[str, tuple[int, ...]]

    @classmethod
    def from_sequence(cls, seq) -> "CodonUsage":
        counts = Counter(as_codons(seq))
        usage = {}
        for aa in AMINO_ACIDS:
            ns = tuple(counts.get(c, 0) for c in STANDARD_CODE.synonyms(aa))
            if sum(ns):
                usage[aa] = ns
        return cls(usage)

    def total(self, aa: str) -> int:
        return sum(self.per_amino_acid[aa])


@dataclass(frozen=True)
class NcResult:
    nc: float
    contributions: Mapping[str, float]
    excluded: Mapping[str, str]

    @property
    def complete(self) -> bool:
        """All 20 amino acids contributed."""
        return len(self.contributions) == len(AMINO_ACIDS)


def _aa(codon: str) -> str:
    return STANDARD_CODE.codon_to_amino_acid[codon]


def _log(x: float | Fraction, base: float) -> float:
    if isinstance(x, Fraction):
        # exact for huge counts where float(x) is still fine but num/den overflow float
        v = math.log(x.numerator) - math.log(x.denominator)
    else:
        v = math.log(x)
    return v if base == math.e else v / math.log(base)


def cpb(seq, table: CpsTable) -> float:
    """Mean CPS over the adjacent codon pairs of ``seq``."""
    seq = as_codons(seq).require_pairs()
    return math.fsum(table.score(a, b) for a, b in pairwise(seq.codons)) / seq.n_pairs


def total_score(codons, table: CpsTable) -> float:
    return math.fsum(table.score(a, b) for a, b in pairwise(codons))


def count_pairs(corpus: Iterable) -> PairCounts:
    pairs: Counter = Counter()
    codons: Counter = Counter()
    for rec in corpus:
        rec = as_codons(rec)
        codons.update(rec.codons)
        pairs.update(pairwise(rec.codons))
    if not codons:
        raise ValueError("empty corpus")
    aas: Counter = Counter()
    for c, n in codons.items():
        aas[_aa(c)] += n
    aa_pairs: Counter = Counter()
    for (a, b), n in pairs.items():
        aa_pairs[_aa(a), _aa(b)] += n
    return PairCounts(dict(pairs), dict(codons), dict(aa_pairs), dict(aas), sum(codons.values()))


def _floor_in_base(floor: float, log_base: float) -> float:
    return floor if log_base == math.e else floor / math.log(log_base)


def table_from_counts(counts: PairCounts, log_base: float = math.e,
                      floor: float = DEFAULT_FLOOR, source: str = "") -> CpsTable:
    """CPS = log(O / E) with E from codon and amino-acid-pair counts.

    Every pair with a positive observed or expected count gets a row;
    ``O == 0`` rows take the floor (given in natural-log units) and are flagged.
    """
    scores, obs, exp, floored = {}, {}, {}, set()
    fl = _floor_in_base(floor, log_base)
    for a in SENSE_CODONS:
        if not counts.codons.get(a):
            continue
        for b in SENSE_CODONS:
            o = counts.pairs.get((a, b), 0)
            e = counts.expected_ratio(a, b)
            if not o and not e:
                continue
            obs[a, b] = float(o)
            exp[a, b] = float(e)
            if o:
                scores[a, b] = _log(o / e, log_base)
            else:
                scores[a, b] = fl
                floored.add((a, b))
    return CpsTable(scores, obs, exp, log_base=log_base, source=source, floored=frozenset(floored))


def build_cps_table(corpus: Iterable, log_base: float = math.e,
                    floor: float = DEFAULT_FLOOR) -> tuple[CpsTable, PairCounts]:
    """Count adjacent pairs within each record and score them.

    Pairs never span record boundaries.
    """
    corpus = list(corpus)
    if not corpus:
        raise ValueError("empty corpus")
    counts = count_pairs(corpus)
    return table_from_counts(counts, log_base, floor, source=f"corpus of {len(corpus)} records"), counts


def normalize_cps(counts: PairCounts, expected: Mapping[Pair, float] | None = None,
                  floor: float = DEFAULT_FLOOR) -> CpsTable:
    """Base-1.5 scores with expected counts rescaled per amino-acid-pair group.

    Within every group of codon pairs encoding the same amino-acid pair the
    expected counts are multiplied by ``sum(O) / sum(E)`` so the group sums
    agree. ``expected`` defaults to codon-independence expectations computed
    from ``counts``; pass a mapping to normalise other expectations.
    """
    log_base = 1.5
    groups: dict[tuple[str, str], list[Pair]] = {}
    keys = set(counts.pairs) | set(expected or ())
    if expected is None:
        keys |= {(a, b) for a in counts.codons for b in counts.codons}
    for a, b in keys:
        groups.setdefault((_aa(a), _aa(b)), []).append((a, b))

    def e_of(p):
        if expected is not None:
            return Fraction(expected.get(p, 0))
        return counts.independence_expected(*p)

    scores, obs, exp, floored = {}, {}, {}, set()
    fl = _floor_in_base(floor, log_base)
    for grp, members in sorted(groups.items()):
        members.sort()
        so = sum(counts.pairs.get(p, 0) for p in members)
        if not so:
            continue
        es = {p: e_of(p) for p in members}
        se = sum(es.values())
        if not se:
            raise TableError(f"amino-acid pair {''.join(grp)} has zero total expected count")
        coef = Fraction(so) / se
        for p in members:
            o = counts.pairs.get(p, 0)
            e_nor = coef * es[p]
            if not o and not e_nor:
                continue
            obs[p] = float(o)
            exp[p] = float(e_nor)
            if o:
                scores[p] = _log(Fraction(o) / e_nor, log_base)
            else:
                scores[p] = fl
                floored.add(p)
    return CpsTable(scores, obs, exp, log_base=log_base, source="normalized", floored=frozenset(floored))


def effective_number_of_codons(usage) -> NcResult:
    """Sum of ``1/F`` over amino acids, ``F = (n * sum(p_i^2) - 1) / (n - 1)``.

    Amino acids with fewer than two uses, or with ``F <= 0``, are left out
    and listed in ``excluded`` with the reason.
    """
    if not isinstance(usage, CodonUsage):
        usage = CodonUsage.from_sequence(usage)
    contributions, excluded = {}, {}
    for aa, ns in usage.per_amino_acid.items():
        n = sum(ns)
        if n < 2:
            excluded[aa] = f"n={n} < 2"
            continue
        f_hat = (n * sum((ni / n) ** 2 for ni in ns) - 1) / (n - 1)
        if f_hat <= 0:
            excluded[aa] = f"F={f_hat:.6g} <= 0"
            continue
        contributions[aa] = 1.0 / f_hat
    return NcResult(math.fsum(contributions.values()), contributions, excluded)


def cpb_delta_swap(seq, i: int, j: int, table: CpsTable) -> float:
    """CPB change from exchanging the codons at ``i`` and ``j``.

    Only the pairs touching ``i`` or ``j`` are rescored.
    """
    seq = as_codons(seq)
    codons = seq.codons
    n = len(codons)
    if not (0 <= i < j < n):
        raise IndexError(f"need 0 <= i < j < {n}, got i={i}, j={j}")
    if _aa(codons[i]) != _aa(codons[j]):
        raise ValueError(f"codons {codons[i]} and {codons[j]} encode different amino acids")
    return swap_delta_total(codons, i, j, table.score) / (n - 1)


def affected_pairs(i: int, j: int, n: int) -> list[int]:
    """Left indices of the pairs touching positions ``i`` and ``j``."""
    return sorted({k for k in (i - 1, i, j - 1, j) if 0 <= k < n - 1})


def swap_delta_total(codons, i: int, j: int, score) -> float:
    ks = affected_pairs(i, j, len(codons))
    ci, cj = codons[i], codons[j]

    def at(k):
        return cj if k == i else ci if k == j else codons[k]

    before = math.fsum(score(codons[k], codons[k + 1]) for k in ks)
    after = math.fsum(score(at(k), at(k + 1)) for k in ks)
    return after - before


def read_cps_table(path, default_score: float = 0.0) -> CpsTable:
    """Read the tab-separated ``PAIR SCORE [OBSERVED EXPECTED]`` format."""
    scores, obs, exp = {}, {}, {}
    log_base = math.e
    try:
        fh = open(path)
    except OSError as e:
        raise TableError(str(e)) from e
    with fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                if key.strip() == "log_base":
                    log_base = math.e if val.strip() in ("e", "") else float(val)
                continue
            fields = line.split("\t") if "\t" in line else line.split()
            if len(fields) not in (2, 4):
                raise TableError(f"line {lineno}: expected 2 or 4 fields, got {len(fields)}")
            pair = fields[0].upper().replace("U", "T")
            a, b = pair[:3], pair[3:]
            if len(pair) != 6 or a not in CODON_INDEX or b not in CODON_INDEX:
                raise TableError(f"line {lineno}: {fields[0]!r} is not a sense-codon pair")
            if (a, b) in scores:
                raise TableError(f"line {lineno}: duplicate pair {pair}")
            try:
                scores[a, b] = float(fields[1])
                if len(fields) == 4:
                    obs[a, b], exp[a, b] = float(fields[2]), float(fields[3])
            except ValueError as e:
                raise TableError(f"line {lineno}: {e}") from e
    if not scores:
        raise TableError(f"{path}: no data lines")
    if obs and len(obs) != len(scores):
        raise TableError(f"{path}: observed/expected columns present on some lines only")
    if len(scores) < len(SENSE_CODONS) ** 2:
        warnings.warn(f"{path}: {len(SENSE_CODONS) ** 2 - len(scores)} pairs missing, "
                      f"scored as {default_score}", stacklevel=2)
    floored = frozenset(p for p, o in obs.items() if o == 0)
    return CpsTable(scores, obs or None, exp or None, log_base=log_base, source=str(path),
                    default_score=default_score, floored=floored)


def format_cps_table(table: CpsTable) -> str:
    base = "e" if table.log_base == math.e else repr(table.log_base)
    lines = [f"#log_base={base}"]
    if table.source:
        lines.append(f"# source: {table.source}")
    for (a, b) in sorted(table.scores):
        row = [a + b, repr(table.scores[a, b])]
        if table.observed is not None:
            row += [repr(table.observed.get((a, b), 0.0)), repr(table.expected.get((a, b), 0.0))]
        lines.append("\t".join(row))
    return "\n".join(lines) + "\n"


def write_cps_table(table: CpsTable, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_cps_table(table))
