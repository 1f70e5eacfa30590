"""Linear-time lattice DP for the best CPB over all synonymous encodings.

Scores are carried as pair-score totals and divided by the number of pairs
once at the end. Synonymous codons are visited in lexicographic order and a
parent is replaced only by a strictly better one, so ties go to the
lexicographically smallest codon.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

from .result import OptimizationResult, direction_sign
from .scoring import CpsTable, cpb
from .seqcore import STANDARD_CODE, AminoAcidSeq, CodonSeq, as_protein


@dataclass(frozen=True)
class DpLattice:
    """Per-position best prefix totals and parent pointers.

    ``codons[i]`` lists the synonymous codons at position ``i``;
    ``best[i][k]`` is the best signed total of a prefix ending in
    ``codons[i][k]`` and ``parent[i][k]`` the index of its predecessor at
    ``i - 1`` (``None`` at position 0).
    """

    codons: tuple[tuple[str, ...], ...]
    best: tuple[tuple[float, ...], ...]
    parent: tuple[tuple[int | None, ...], ...]
    sign: int
    pair_evaluations: int

    def backtrack(self, k: int) -> list[str]:
        out = []
        for i in range(len(self.codons) - 1, -1, -1):
            out.append(self.codons[i][k])
            k = self.parent[i][k]
        return out[::-1]


def synonym_lattice(protein: AminoAcidSeq) -> tuple[tuple[str, ...], ...]:
    return tuple(STANDARD_CODE.synonyms(aa) for aa in protein)


def build_lattice(protein, table: CpsTable, direction: str = "max",
                  first: str | None = None) -> DpLattice:
    """Forward pass. ``first`` pins the codon at position 0."""
    protein = as_protein(protein)
    sign = direction_sign(direction)
    layers = synonym_lattice(protein)
    if first is not None:
        if first not in layers[0]:
            raise ValueError(f"{first} does not encode {protein[0]}")
        layers = ((first,),) + layers[1:]
    best = [tuple(0.0 for _ in layers[0])]
    parent = [tuple(None for _ in layers[0])]
    evals = 0
    for i in range(1, len(layers)):
        prev, prev_best = layers[i - 1], best[-1]
        row, ptr = [], []
        for b in layers[i]:
            top, arg = -math.inf, None
            for k, a in enumerate(prev):
                v = prev_best[k] + sign * table.score(a, b)
                evals += 1
                if v > top:
                    top, arg = v, k
            row.append(top)
            ptr.append(arg)
        best.append(tuple(row))
        parent.append(tuple(ptr))
    return DpLattice(layers, tuple(best), tuple(parent), sign, evals)


def optimize_unconstrained(protein, table: CpsTable, direction: str = "max") -> OptimizationResult:
    """Globally optimal CPB encoding, any codon usage allowed."""
    t0 = time.perf_counter()
    protein = as_protein(protein)
    lat = build_lattice(protein, table, direction)
    last = lat.best[-1]
    k = max(range(len(last)), key=lambda k: (last[k], -k))
    seq = CodonSeq(tuple(lat.backtrack(k)))
    return OptimizationResult(
        seq, cpb(seq, table), "dp", direction, True,
        {"pair_evaluations": lat.pair_evaluations, "seconds": time.perf_counter() - t0})


@dataclass(frozen=True)
class SuffixBounds:
    """Best achievable suffix total from each ``(position, codon)``.

    ``value(i, c)`` is the optimum, over encodings of positions ``i..end``
    starting with codon ``c``, of the pair-score total of that suffix, in
    real (unsigned) units. ``signed(i, c)`` is the same in maximisation
    units, which is what branch-and-bound compares against.
    """

    codons: tuple[tuple[str, ...], ...]
    _signed: tuple[dict[str, float], ...]
    sign: int

    def signed(self, i: int, codon: str) -> float:
        return self._signed[i][codon]

    def value(self, i: int, codon: str) -> float:
        return self.sign * self._signed[i][codon]

    def __len__(self) -> int:
        return len(self._signed)


def suffix_bounds(protein, table: CpsTable, direction: str = "max") -> SuffixBounds:
    protein = as_protein(protein)
    sign = direction_sign(direction)
    layers = synonym_lattice(protein)
    out: list[dict[str, float]] = [dict.fromkeys(layers[-1], 0.0)]
    for i in range(len(layers) - 2, -1, -1):
        nxt = out[-1]
        out.append({a: max(sign * table.score(a, b) + nxt[b] for b in layers[i + 1])
                    for a in layers[i]})
    return SuffixBounds(layers, tuple(reversed(out)), sign)
