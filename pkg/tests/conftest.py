import random

import pytest

from codonctx.scoring import CpsTable
from codonctx.seqcore import SENSE_CODONS, STANDARD_CODE, CodonSeq, extract_codon_distribution

# amino acids with several codons, so fixed-distribution problems have room to move
DEGENERATE = "LSRAGVPTKNE"


def random_table(rng: random.Random, dyadic: bool = False, scale: float = 0.5) -> CpsTable:
    """Full 61x61 table. Dyadic scores (multiples of 1/8) make sums exact and ties common."""
    if dyadic:
        return CpsTable({(a, b): rng.randint(-8, 8) / 8 for a in SENSE_CODONS for b in SENSE_CODONS})
    return CpsTable({(a, b): rng.gauss(0, scale) for a in SENSE_CODONS for b in SENSE_CODONS})


def random_gene(rng: random.Random, length: int, alphabet: str = DEGENERATE) -> CodonSeq:
    protein = "".join(rng.choice(alphabet) for _ in range(length))
    return CodonSeq(tuple(rng.choice(STANDARD_CODE.synonyms(a)) for a in protein))


def random_instance(rng: random.Random, max_len: int = 10, dyadic: bool | None = None):
    """(protein, distribution, table, wild-type gene) with length 2..max_len."""
    if dyadic is None:
        dyadic = rng.random() < 0.5
    gene = random_gene(rng, rng.randint(2, max_len), rng.choice([DEGENERATE, "LSR", "KNLA"]))
    protein = "".join(STANDARD_CODE.codon_to_amino_acid[c] for c in gene)
    return protein, extract_codon_distribution(gene), random_table(rng, dyadic), gene


@pytest.fixture
def rng():
    return random.Random(20240611)


ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def verdict(request, capsys):
    """Print and record one PASS/FAIL line for an acceptance criterion, then assert it."""
    lines = request.config.stash.setdefault(ACCEPTANCE, [])

    def emit(label: str, ok: bool | None, detail: str = ""):
        tag = "SKIP" if ok is None else ("PASS" if ok else "FAIL")
        line = f"[{tag}] {label}" + (f": {detail}" if detail else "")
        lines.append(line)
        with capsys.disabled():
            print("\n" + line)
        if ok is None:
            pytest.skip(detail)
        assert ok, line

    return emit


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
