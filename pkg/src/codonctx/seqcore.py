"""Sequence types, the standard genetic code, FASTA parsing and codon counting."""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from itertools import product
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

STOP = "*"
NUCLEOTIDES = "TCAG"

# NCBI translation table 1, codons in TCAG order
_TABLE1_AAS = "FFLLSSSSYY**CC*WLLLLPPPPHHQQRRRRIIIMTTTTNNKKSSRRVVVVAAAADDEEGGGG"


class SequenceError(ValueError):
    """Invalid coding sequence (length, STOP placement, alphabet)."""


class FastaError(ValueError):
    """Malformed FASTA input. ``record`` and ``offset`` locate the problem."""

    def __init__(self, message: str, record: str | None = None, offset: int | None = None):
        self.record = record
        self.offset = offset
        where = []
        if record is not None:
            where.append(f"record {record!r}")
        if offset is not None:
            where.append(f"offset {offset}")
        super().__init__(message + (f" ({', '.join(where)})" if where else ""))


class DistributionError(ValueError):
    """Codon distribution does not match the protein it should encode."""


@dataclass(frozen=True)
class GeneticCode:
    codon_to_amino_acid: Mapping[str, str]
    amino_acid_to_codons: Mapping[str, tuple[str, ...]]

    @classmethod
    def standard(cls) -> "GeneticCode":
        codons = ["".join(p) for p in product(NUCLEOTIDES, repeat=3)]
        c2a = dict(zip(codons, _TABLE1_AAS))
        groups: dict[str, list[str]] = {}
        for codon, aa in c2a.items():
            groups.setdefault(aa, []).append(codon)
        a2c = {aa: tuple(sorted(cs)) for aa, cs in sorted(groups.items())}
        return cls(MappingProxyType(c2a), MappingProxyType(a2c))

    @property
    def sense_codons(self) -> tuple[str, ...]:
        return tuple(sorted(c for c, a in self.codon_to_amino_acid.items() if a != STOP))

    @property
    def amino_acids(self) -> tuple[str, ...]:
        return tuple(a for a in self.amino_acid_to_codons if a != STOP)

    def synonyms(self, amino_acid: str) -> tuple[str, ...]:
        """Codons for ``amino_acid`` in lexicographic order."""
        return self.amino_acid_to_codons[amino_acid]

    def is_stop(self, codon: str) -> bool:
        return self.codon_to_amino_acid[codon] == STOP


STANDARD_CODE = GeneticCode.standard()
SENSE_CODONS: tuple[str, ...] = STANDARD_CODE.sense_codons
CODON_INDEX: Mapping[str, int] = MappingProxyType({c: i for i, c in enumerate(SENSE_CODONS)})
AMINO_ACIDS: tuple[str, ...] = STANDARD_CODE.amino_acids


@dataclass(frozen=True)
class AminoAcidSeq:
    residues: str

    def __post_init__(self):
        res = self.residues.upper()
        object.__setattr__(self, "residues", res)
        if len(res) < 2:
            raise SequenceError("protein must have at least 2 residues")
        bad = [r for r in res if r not in STANDARD_CODE.amino_acid_to_codons or r == STOP]
        if bad:
            raise SequenceError(f"illegal residue {bad[0]!r} in protein")

    def __len__(self) -> int:
        return len(self.residues)

    def __iter__(self) -> Iterator[str]:
        return iter(self.residues)

    def __getitem__(self, i):
        return self.residues[i]

    def __str__(self) -> str:
        return self.residues


@dataclass(frozen=True)
class CodonSeq:
    codons: tuple[str, ...]
    trailing_stop: bool = False

    def __post_init__(self):
        codons = tuple(c.upper() for c in self.codons)
        object.__setattr__(self, "codons", codons)
        if not codons:
            raise SequenceError("empty coding sequence")
        for i, c in enumerate(codons):
            if c not in STANDARD_CODE.codon_to_amino_acid:
                raise SequenceError(f"illegal codon {c!r} at codon {i + 1}")
            if STANDARD_CODE.is_stop(c):
                raise SequenceError(f"internal STOP at codon {i + 1}")

    def __len__(self) -> int:
        return len(self.codons)

    def __iter__(self) -> Iterator[str]:
        return iter(self.codons)

    def __getitem__(self, i):
        return self.codons[i]

    def __str__(self) -> str:
        return "".join(self.codons)

    @property
    def n_pairs(self) -> int:
        return len(self.codons) - 1

    def require_pairs(self) -> "CodonSeq":
        """Return self, or raise if there is no codon pair to score."""
        if len(self.codons) < 2:
            raise SequenceError("coding sequence must have at least 2 codons")
        return self


@dataclass(frozen=True)
class CodonDistribution:
    counts: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for codon, n in sorted(self.counts.items()):
            if n < 0:
                raise DistributionError(f"negative count for {codon}")
            if codon not in CODON_INDEX:
                raise DistributionError(f"{codon!r} is not a sense codon")
            if n:
                clean[codon] = int(n)
        object.__setattr__(self, "counts", MappingProxyType(clean))

    def __getitem__(self, codon: str) -> int:
        return self.counts.get(codon, 0)

    def __eq__(self, other) -> bool:
        if isinstance(other, CodonDistribution):
            return dict(self.counts) == dict(other.counts)
        if isinstance(other, Mapping):
            return dict(self.counts) == {k: v for k, v in other.items() if v}
        return NotImplemented

    def __hash__(self) -> int:
        return hash(tuple(self.counts.items()))

    def per_amino_acid(self, code: GeneticCode = STANDARD_CODE) -> dict[str, dict[str, int]]:
        out: dict[str, dict[str, int]] = {}
        for codon, n in self.counts.items():
            out.setdefault(code.codon_to_amino_acid[codon], {})[codon] = n
        return out

    def to_dict(self) -> dict[str, int]:
        return dict(self.counts)


def as_protein(protein) -> AminoAcidSeq:
    return protein if isinstance(protein, AminoAcidSeq) else AminoAcidSeq(str(protein))


def as_codons(seq) -> CodonSeq:
    if isinstance(seq, CodonSeq):
        return seq
    if isinstance(seq, str):
        return validate_cds(seq)
    return CodonSeq(tuple(seq))


def as_distribution(dist) -> CodonDistribution:
    return dist if isinstance(dist, CodonDistribution) else CodonDistribution(dict(dist))


def parse_fasta(text: str | Iterable[str]) -> list[tuple[str, str]]:
    """Parse FASTA text into ``(identifier, sequence)`` records.

    Bodies are uppercased and U is normalised to T. Anything outside ACGT
    raises :class:`FastaError` with the record name and the 0-based offset
    of the bad character within that record's sequence.
    """
    if not isinstance(text, str):
        text = "".join(text)
    records: list[tuple[str, str]] = []
    name: str | None = None
    chunks: list[str] = []
    offset = 0
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith(">"):
            if name is not None:
                records.append((name, "".join(chunks)))
            name = line[1:].strip().split()[0] if line[1:].strip() else ""
            if not name:
                raise FastaError("empty header", offset=lineno)
            chunks, offset = [], 0
            continue
        if name is None:
            raise FastaError("missing header", offset=lineno)
        body = "".join(line.split()).upper().replace("U", "T")
        for i, ch in enumerate(body):
            if ch not in "ACGT":
                raise FastaError(f"illegal character {ch!r}", record=name, offset=offset + i)
        chunks.append(body)
        offset += len(body)
    if name is not None:
        records.append((name, "".join(chunks)))
    return records


def read_fasta(path) -> list[tuple[str, str]]:
    with open(path) as fh:
        return parse_fasta(fh.read())


def format_fasta(records: Iterable[tuple[str, str]], width: int = 60) -> str:
    lines = []
    for name, seq in records:
        lines.append(f">{name}")
        lines.extend(seq[i:i + width] for i in range(0, len(seq), width))
    return "\n".join(lines) + "\n"


def validate_cds(raw: str) -> CodonSeq:
    seq = raw.upper().replace("U", "T")
    if len(seq) % 3:
        raise SequenceError(f"length {len(seq)} is not divisible by 3")
    codons = [seq[i:i + 3] for i in range(0, len(seq), 3)]
    trailing = bool(codons) and codons[-1] in STANDARD_CODE.codon_to_amino_acid \
        and STANDARD_CODE.is_stop(codons[-1])
    if trailing:
        codons.pop()
    # CodonSeq reports any remaining STOP as internal
    return CodonSeq(tuple(codons), trailing_stop=trailing)


def translate(seq, code: GeneticCode = STANDARD_CODE) -> AminoAcidSeq:
    seq = as_codons(seq)
    return AminoAcidSeq("".join(code.codon_to_amino_acid[c] for c in seq))


def extract_codon_distribution(seq) -> CodonDistribution:
    return CodonDistribution(Counter(as_codons(seq)))


def check_consistent(protein, dist, code: GeneticCode = STANDARD_CODE) -> None:
    """Raise DistributionError unless ``dist`` can encode ``protein`` exactly."""
    protein, dist = as_protein(protein), as_distribution(dist)
    needed = Counter(protein)
    have: Counter = Counter()
    for codon, n in dist.counts.items():
        have[code.codon_to_amino_acid[codon]] += n
    if needed != have:
        raise DistributionError(
            f"inconsistent distribution: protein needs {dict(sorted(needed.items()))}, "
            f"distribution provides {dict(sorted(have.items()))}")


def random_synonymous_encoding(protein, dist, seed: int | random.Random) -> CodonSeq:
    """Shuffle the codons of ``dist`` among the positions of their amino acids."""
    protein, dist = as_protein(protein), as_distribution(dist)
    check_consistent(protein, dist)
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    pools: dict[str, list[str]] = {}
    for aa, cs in sorted(dist.per_amino_acid().items()):
        pool = [c for c, n in sorted(cs.items()) for _ in range(n)]
        rng.shuffle(pool)
        pools[aa] = pool
    codons = [pools[aa].pop() for aa in protein]
    return CodonSeq(tuple(codons))


def positions_by_amino_acid(protein: Sequence[str]) -> dict[str, list[int]]:
    out: dict[str, list[int]] = {}
    for i, aa in enumerate(protein):
        out.setdefault(aa, []).append(i)
    return out
