import math
import random
from collections import Counter
from itertools import pairwise

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from codonctx.scoring import (
    CodonUsage,
    CpsTable,
    PairCounts,
    TableError,
    build_cps_table,
    count_pairs,
    cpb,
    cpb_delta_swap,
    effective_number_of_codons,
    format_cps_table,
    normalize_cps,
    read_cps_table,
    table_from_counts,
    write_cps_table,
)
from codonctx.seqcore import AMINO_ACIDS, SENSE_CODONS, STANDARD_CODE, CodonSeq

from conftest import random_gene, random_table

AA = STANDARD_CODE.codon_to_amino_acid


# ---- cpb ----

def test_cpb_zero_table():
    assert cpb(["AAA", "AAT", "AAC"], CpsTable({})) == 0.0


def test_cpb_single_pair():
    assert cpb(["AAA", "AAT"], CpsTable({("AAA", "AAT"): 1.4})) == 1.4


def test_cpb_two_pairs():
    t = CpsTable({("AAA", "AAT"): 1.0, ("AAT", "AAA"): 0.5})
    assert cpb(["AAA", "AAT", "AAA"], t) == 0.75


def test_cpb_default_score_for_missing_pairs():
    t = CpsTable({("AAA", "AAT"): 1.0}, default_score=-1.0)
    assert cpb(["AAA", "AAT", "AAA"], t) == 0.0


def test_cpb_matches_naive_loop(rng):
    for _ in range(50):
        t = random_table(rng)
        g = random_gene(rng, rng.randint(2, 60))
        naive = 0.0
        for k in range(len(g) - 1):
            naive += t.scores[g[k], g[k + 1]]
        assert cpb(g, t) == pytest.approx(naive / (len(g) - 1), abs=1e-12)


def test_cpb_accepts_nucleotide_string():
    t = CpsTable({("ATG", "TGG"): 0.3})
    assert cpb("ATGTGGTAA", t) == 0.3


# ---- table construction ----

def _oracle_expected(corpus):
    """Expected pair counts straight from the corpus, float arithmetic."""
    codons = Counter(c for rec in corpus for c in rec)
    aas = Counter(AA[c] for rec in corpus for c in rec)
    aa_pairs = Counter((AA[a], AA[b]) for rec in corpus for a, b in pairwise(rec))
    pairs = Counter(p for rec in corpus for p in pairwise(rec))
    exp = {}
    for a in codons:
        for b in codons:
            exp[a, b] = codons[a] * codons[b] / (aas[AA[a]] * aas[AA[b]]) * aa_pairs[AA[a], AA[b]]
    return pairs, exp


def test_build_single_codon_corpus():
    t, counts = build_cps_table([CodonSeq(("AAA",) * 3)])
    assert counts.pairs == {("AAA", "AAA"): 2}
    assert t.scores == {("AAA", "AAA"): 0.0}


def test_build_length_two_record():
    t, counts = build_cps_table([CodonSeq(("AAA", "AAT"))])
    assert sum(1 for o in t.observed.values() if o > 0) == 1
    assert len(t.scores) == 1


def test_build_under_represented_pair():
    # GCC/GCA and GAA/GAG have equal codon counts, so both pairs expect 20
    corpus = ([CodonSeq(("GCC", "GAA"))] * 10 + [CodonSeq(("GCA", "GAG"))] * 70
              + [CodonSeq(("GCC", "TGG"))] * 60 + [CodonSeq(("TGG", "GAA"))] * 60)
    t, _ = build_cps_table(corpus)
    assert t.expected["GCC", "GAA"] == t.expected["GCA", "GAG"] == 20
    assert t.score("GCC", "GAA") < t.score("GCA", "GAG")
    assert t.score("GCC", "GAA") == pytest.approx(math.log(0.5))


def test_build_matches_float_oracle(rng):
    corpus = [random_gene(rng, rng.randint(2, 80)) for _ in range(40)]
    t, _ = build_cps_table(corpus)
    pairs, exp = _oracle_expected([c.codons for c in corpus])
    for p, o in pairs.items():
        assert t.scores[p] == pytest.approx(math.log(o / exp[p]), abs=1e-9)
        assert t.expected[p] == pytest.approx(exp[p], rel=1e-12)
    for p, s in t.scores.items():
        if t.observed[p] == 0:
            assert s == -10.0 and p in t.floored


def test_build_no_pairs_across_records():
    t, counts = build_cps_table([CodonSeq(("AAA", "AAG")), CodonSeq(("CTG", "TTA"))])
    assert set(counts.pairs) == {("AAA", "AAG"), ("CTG", "TTA")}
    assert counts.total_pairs == 2


def test_build_log_base_recorded():
    corpus = [CodonSeq(("AAA", "AAG", "AAA", "AAA"))]
    t2, _ = build_cps_table(corpus, log_base=2)
    te, _ = build_cps_table(corpus)
    assert t2.log_base == 2
    for p in te.scores:
        if te.observed[p]:
            assert t2.scores[p] == pytest.approx(te.scores[p] / math.log(2))


def test_build_empty_corpus():
    with pytest.raises(ValueError, match="empty corpus"):
        build_cps_table([])


def test_counts_invariants(rng):
    corpus = [random_gene(rng, rng.randint(2, 30)) for _ in range(20)]
    c = count_pairs(corpus)
    assert sum(c.codons.values()) == c.total_codons
    assert c.total_pairs == sum(len(g) - 1 for g in corpus)
    assert sum(c.amino_acid_pairs.values()) == c.total_pairs


def test_score_is_log_ratio_invariant(rng):
    t, _ = build_cps_table([random_gene(rng, 50) for _ in range(30)], log_base=1.7)
    for p, o in t.observed.items():
        if o > 0:
            assert t.scores[p] == pytest.approx(math.log(o / t.expected[p], 1.7), abs=1e-9)


@given(st.integers(2, 50), st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_count_scaling_invariance(k, seed):
    r = random.Random(seed)
    counts = count_pairs([random_gene(r, r.randint(2, 40)) for _ in range(r.randint(1, 8))])
    base = table_from_counts(counts)
    scaled = table_from_counts(counts.scaled(k))
    assert scaled.scores == base.scores


def test_independent_codons_scores_shrink():
    """Null corpus: each score is within 5 sampling sd of 0, and the spread falls ~1/sqrt(N)."""
    g = np.random.default_rng(7)
    spreads = []
    for n_pairs in (100_000, 1_000_000):
        idx = g.integers(0, 61, size=(n_pairs // 500, 501))
        corpus = [CodonSeq(tuple(SENSE_CODONS[i] for i in row)) for row in idx]
        t, _ = build_cps_table(corpus)
        for p, s in t.scores.items():
            # log(O/E) ~ (O-E)/E with sd about 1/sqrt(E)
            assert abs(s) < 5.5 / math.sqrt(t.expected[p])
        spreads.append(np.std(list(t.scores.values())))
    assert spreads[1] < spreads[0] / 2.5


# ---- normalised scores ----

def _two_pair_counts(o1, o2):
    return PairCounts({("GCC", "GAA"): o1, ("GCA", "GAG"): o2},
                      {"GCC": o1, "GAA": o1, "GCA": o2, "GAG": o2},
                      {("A", "E"): o1 + o2}, {"A": o1 + o2, "E": o1 + o2}, 2 * (o1 + o2))


def test_normalize_hand_example():
    t = normalize_cps(_two_pair_counts(6, 2), expected={("GCC", "GAA"): 2, ("GCA", "GAG"): 2})
    assert t.log_base == 1.5
    assert t.expected == {("GCC", "GAA"): 4.0, ("GCA", "GAG"): 4.0}
    assert t.scores["GCC", "GAA"] == pytest.approx(1.0)
    assert t.scores["GCA", "GAG"] == pytest.approx(math.log(0.5, 1.5))
    assert t.scores["GCA", "GAG"] == pytest.approx(-1.7095, abs=1e-4)


def test_normalize_identity_coefficient():
    t = normalize_cps(_two_pair_counts(3, 5), expected={("GCC", "GAA"): 4, ("GCA", "GAG"): 4})
    assert t.scores["GCC", "GAA"] == pytest.approx(math.log(3 / 4, 1.5))
    assert t.scores["GCA", "GAG"] == pytest.approx(math.log(5 / 4, 1.5))


def test_normalize_uniform_corpus_is_zero():
    corpus = [CodonSeq((a, b)) for a in SENSE_CODONS for b in SENSE_CODONS]
    t = normalize_cps(count_pairs(corpus))
    assert len(t.scores) == 3721
    assert max(abs(s) for s in t.scores.values()) < 1e-9


def test_normalize_group_sums(rng):
    counts = count_pairs([random_gene(rng, rng.randint(2, 60), "".join(AMINO_ACIDS))
                          for _ in range(50)])
    t = normalize_cps(counts)
    groups_o, groups_e = Counter(), Counter()
    for p in t.observed:
        key = (AA[p[0]], AA[p[1]])
        groups_o[key] += t.observed[p]
        groups_e[key] += t.expected[p]
    assert groups_o
    for key in groups_o:
        assert groups_e[key] == pytest.approx(groups_o[key], rel=1e-6)


def test_normalize_matches_base_e_scores_rescaled(rng):
    counts = count_pairs([random_gene(rng, 40) for _ in range(30)])
    te = table_from_counts(counts)
    tn = normalize_cps(counts)
    for p, o in te.observed.items():
        if o:
            assert tn.scores[p] == pytest.approx(te.scores[p] / math.log(1.5), abs=1e-9)


def test_normalize_zero_expected_group():
    with pytest.raises(TableError, match="zero total expected"):
        normalize_cps(_two_pair_counts(1, 1), expected={})


# ---- effective number of codons ----

def test_nc_monomorphic():
    r = effective_number_of_codons(CodonUsage({"K": (10, 0)}))
    assert r.contributions["K"] == 1.0


def test_nc_two_codons_even():
    r = effective_number_of_codons(CodonUsage({"K": (50, 50)}))
    # F = (100 * 0.5 - 1) / 99 = 49/99
    assert r.contributions["K"] == pytest.approx(99 / 49)
    assert r.nc == pytest.approx(2.0204, abs=1e-4)


def test_nc_one_codon_per_amino_acid():
    codons = tuple(c for aa in AMINO_ACIDS for c in [STANDARD_CODE.synonyms(aa)[0]] * 3)
    r = effective_number_of_codons(CodonSeq(codons))
    assert r.complete and r.nc == pytest.approx(20.0)


def test_nc_exclusions():
    r = effective_number_of_codons(CodonUsage({"K": (1, 0), "L": (1, 1, 0, 0, 0, 0),
                                               "N": (3, 3)}))
    assert "K" in r.excluded
    # two uses, two codons: F = (2 * 0.5 - 1) / 1 = 0
    assert "L" in r.excluded
    assert set(r.contributions) == {"N"}


def test_nc_uniform_usage_reaches_61_in_the_limit():
    # equal use of every codon gives F slightly below 1/k, approaching it as n grows
    usage = CodonUsage({aa: (10_000,) * len(STANDARD_CODE.synonyms(aa)) for aa in AMINO_ACIDS})
    assert effective_number_of_codons(usage).nc == pytest.approx(61, rel=1e-3)


@given(st.integers(0, 10_000))
def test_nc_range_when_homozygosity_at_least_one_over_k(seed):
    r = random.Random(seed)
    usage = {}
    for aa in AMINO_ACIDS:
        k = len(STANDARD_CODE.synonyms(aa))
        while True:
            ns = tuple(r.randint(0, 6) for _ in range(k))
            n = sum(ns)
            if n >= 2 and (n * sum((x / n) ** 2 for x in ns) - 1) / (n - 1) >= 1 / k:
                break
        usage[aa] = ns
    res = effective_number_of_codons(CodonUsage(usage))
    assert res.complete
    assert 20 - 1e-9 <= res.nc <= 61 + 1e-9


# ---- swap deltas ----

def _full_delta(codons, i, j, t):
    after = list(codons)
    after[i], after[j] = after[j], after[i]
    return cpb(after, t) - cpb(codons, t)


def test_swap_identical_codons():
    t = CpsTable({("AAA", "GGG"): 1.0})
    assert cpb_delta_swap(["AAA", "GGG", "AAA"], 0, 2, t) == 0.0


def test_swap_hand_example():
    t = CpsTable({("AAA", "GGG"): 1, ("GGG", "AAG"): 0, ("AAG", "GGG"): 2, ("GGG", "AAA"): 0})
    assert cpb_delta_swap(["AAA", "GGG", "AAG"], 0, 2, t) == 0.5
    assert _full_delta(["AAA", "GGG", "AAG"], 0, 2, t) == 0.5


def test_swap_errors():
    t = CpsTable({})
    with pytest.raises(ValueError, match="different amino acids"):
        cpb_delta_swap(["AAA", "GGG", "AAG"], 0, 1, t)
    with pytest.raises(IndexError):
        cpb_delta_swap(["AAA", "AAG"], 0, 2, t)
    with pytest.raises(IndexError):
        cpb_delta_swap(["AAA", "AAG"], 1, 0, t)


@st.composite
def swap_cases(draw):
    seed = draw(st.integers(0, 2**31))
    r = random.Random(seed)
    n = draw(st.integers(2, 30))
    g = random_gene(r, n, draw(st.sampled_from(["K", "KN", "LSR", "LSRAGVPTKNE"])))
    by_aa = {}
    for k, c in enumerate(g):
        by_aa.setdefault(AA[c], []).append(k)
    choices = [ps for ps in by_aa.values() if len(ps) >= 2]
    if not choices:
        return g, None, None, random_table(r)
    ps = draw(st.sampled_from(choices))
    i, j = sorted(draw(st.lists(st.sampled_from(ps), min_size=2, max_size=2, unique=True)))
    return g, i, j, random_table(r)


@given(swap_cases())
@settings(max_examples=300, deadline=None)
def test_swap_delta_equals_recompute(case):
    g, i, j, t = case
    if i is None:
        return
    assert cpb_delta_swap(g, i, j, t) == pytest.approx(_full_delta(g.codons, i, j, t), abs=1e-12)


def test_adjacent_swap_uses_three_pairs(rng):
    from codonctx.scoring import affected_pairs
    assert affected_pairs(3, 4, 10) == [2, 3, 4]
    assert affected_pairs(0, 5, 10) == [0, 4, 5]
    assert affected_pairs(0, 1, 2) == [0]
    assert affected_pairs(2, 9, 10) == [1, 2, 8]


# ---- file format ----

def test_table_round_trip(tmp_path, rng):
    t, _ = build_cps_table([random_gene(rng, 40) for _ in range(10)], log_base=1.5)
    path = tmp_path / "t.tsv"
    write_cps_table(t, path)
    with pytest.warns(UserWarning, match="pairs missing"):
        back = read_cps_table(path)
    assert back.scores == t.scores
    assert back.observed == t.observed and back.expected == t.expected
    assert back.log_base == 1.5
    assert back.floored == t.floored


def test_table_full_no_warning(tmp_path, rng, recwarn):
    t = random_table(rng)
    path = tmp_path / "t.tsv"
    write_cps_table(t, path)
    back = read_cps_table(path)
    assert len(back.scores) == 3721 and not back.has_counts
    assert not [w for w in recwarn if "missing" in str(w.message)]


def test_table_header_and_comments(tmp_path):
    path = tmp_path / "t.tsv"
    path.write_text("# a comment\n#log_base=2\nAAAAAT\t1.5\t3\t1\n")
    with pytest.warns(UserWarning):
        t = read_cps_table(path)
    assert t.log_base == 2 and t.score("AAA", "AAT") == 1.5 and t.score("AAA", "AAA") == 0


@pytest.mark.parametrize("body, msg", [
    ("AAAAA\t1.0\n", "not a sense-codon pair"),
    ("AAATAA\t1.0\n", "not a sense-codon pair"),
    ("AAAAAT\tx\n", "line 1"),
    ("AAAAAT\t1\t2\n", "2 or 4 fields"),
    ("AAAAAT\t1\nAAAAAT\t2\n", "duplicate"),
    ("# only comments\n", "no data"),
])
def test_table_errors(tmp_path, body, msg):
    path = tmp_path / "t.tsv"
    path.write_text(body)
    with pytest.raises(TableError, match=msg):
        read_cps_table(path)


def test_table_rejects_stop_pairs():
    with pytest.raises(TableError):
        CpsTable({("TAA", "AAA"): 1.0})


def test_format_has_log_base_header():
    assert format_cps_table(CpsTable({("AAA", "AAT"): 1.0})).startswith("#log_base=e\n")
