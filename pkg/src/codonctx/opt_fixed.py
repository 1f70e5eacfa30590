"""Exact CPB optimisation when the codon distribution is fixed.

Three routes to the same optimum: a DP over (last codon, residual codon
counts) states, depth-first branch-and-bound pruned by unconstrained suffix
optima, and plain enumeration for small inputs.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from itertools import product
from math import factorial

from .opt_dp import suffix_bounds
from .opt_sa import SaParams, optimize_sa
from .result import OptimizationResult, direction_sign
from .scoring import CpsTable, cpb, total_score
from .seqcore import (
    STANDARD_CODE,
    CodonSeq,
    as_distribution,
    as_protein,
    check_consistent,
    extract_codon_distribution,
)

DEFAULT_STATE_CAP = 5_000_000
ENUMERATION_CAP = 1_000_000
# slack on the pruning test so float rounding in prefix sums never cuts a tie
PRUNE_TOL = 1e-9


class StateCapExceeded(RuntimeError):
    def __init__(self, estimate: int, cap: int):
        self.estimate, self.cap = estimate, cap
        super().__init__(f"estimated {estimate} states exceeds cap {cap}")


def _aa(codon: str) -> str:
    return STANDARD_CODE.codon_to_amino_acid[codon]


def _pools(protein, dist) -> dict[str, list[str]]:
    """Codons in use per amino acid, lexicographic."""
    pools: dict[str, list[str]] = {}
    for codon in sorted(dist.counts):
        pools.setdefault(_aa(codon), []).append(codon)
    return pools


def _bounded_compositions(caps: list[int]) -> list[int]:
    """``out[p]`` = number of vectors ``0 <= u_c <= caps[c]`` with ``sum(u) == p``."""
    poly = [1]
    for cap in caps:
        nxt = [0] * (len(poly) + cap)
        for i, v in enumerate(poly):
            if v:
                for u in range(cap + 1):
                    nxt[i + u] += v
        poly = nxt
    return poly


def estimate_states(protein, dist) -> int:
    """Number of (position, last codon, residual counts) states the DP can reach."""
    protein, dist = as_protein(protein), as_distribution(dist)
    pools = _pools(protein, dist)
    ways = {aa: _bounded_compositions([dist[c] for c in cs]) for aa, cs in pools.items()}
    seen = dict.fromkeys(pools, 0)
    total = 0
    for aa in protein:
        seen[aa] += 1
        prod = len(pools[aa])
        for other, p in seen.items():
            prod *= ways[other][p]
        total += prod
    return total


def optimize_exact_dp(protein, dist, table: CpsTable, direction: str = "max",
                      state_cap: int = DEFAULT_STATE_CAP) -> OptimizationResult:
    """Optimal CPB among encodings using exactly the codon counts in ``dist``.

    A state is the last codon plus how many of each codon are used so far.
    For an amino acid with ``k`` codons in use only ``k - 1`` counts are
    kept; the last follows from the number of its positions in the prefix.
    """
    t0 = time.perf_counter()
    protein, dist = as_protein(protein), as_distribution(dist)
    check_consistent(protein, dist)
    estimate = estimate_states(protein, dist)
    if estimate > state_cap:
        raise StateCapExceeded(estimate, state_cap)
    sign = direction_sign(direction)

    pools = _pools(protein, dist)
    # one slot per tracked codon; the last codon of each pool is implied
    slot = {}
    for aa, cs in sorted(pools.items()):
        for c in cs[:-1]:
            slot[c] = len(slot)
    width = len(slot)
    seen_aa: dict[str, int] = {}

    def choices(aa: str, used: tuple[int, ...], prefix_count: int):
        cs = pools[aa]
        tracked_sum = 0
        for c in cs[:-1]:
            u = used[slot[c]]
            tracked_sum += u
            if u < dist[c]:
                nxt = list(used)
                nxt[slot[c]] += 1
                yield c, tuple(nxt)
        if prefix_count - tracked_sum < dist[cs[-1]]:
            yield cs[-1], used

    layers: list[dict] = []
    first = protein[0]
    layer = {}
    for c, used in choices(first, (0,) * width, 0):
        layer[c, used] = (0.0, None)
    layers.append(layer)
    seen_aa[first] = 1
    states = len(layer)
    for i in range(1, len(protein)):
        aa = protein[i]
        k = seen_aa.get(aa, 0)
        nxt: dict = {}
        for (a, used), (val, _) in layers[-1].items():
            for b, used_b in choices(aa, used, k):
                v = val + sign * table.score(a, b)
                key = (b, used_b)
                cur = nxt.get(key)
                if cur is None or v > cur[0] or (v == cur[0] and a < cur[1][0]):
                    nxt[key] = (v, (a, used))
        seen_aa[aa] = k + 1
        layers.append(nxt)
        states += len(nxt)

    last = layers[-1]
    key = max(last, key=lambda s: (last[s][0], [-ord(ch) for ch in s[0]]))
    codons = []
    for i in range(len(layers) - 1, -1, -1):
        codons.append(key[0])
        key = layers[i][key][1]
    seq = CodonSeq(tuple(reversed(codons)))
    return OptimizationResult(seq, cpb(seq, table), "exact", direction, True,
                              {"states": states, "state_estimate": estimate,
                               "seconds": time.perf_counter() - t0})


@dataclass
class BnbNode:
    """DFS frame: the prefix so far, its score and the codons still available."""

    depth: int
    prefix_score: float
    residual: dict[str, int]
    last_codon: str


def optimize_bnb(protein, dist, table: CpsTable, direction: str = "max",
                 incumbent: OptimizationResult | None | str = "sa",
                 node_budget: int | None = None, prune: bool = True,
                 sa_params: SaParams | None = None) -> OptimizationResult:
    """Depth-first branch-and-bound over codon assignments honouring ``dist``.

    A child is cut when its prefix score plus the unconstrained optimum of
    the remaining suffix (starting from that child's codon) falls strictly
    below the incumbent. ``incumbent`` may be a feasible result, ``"sa"``
    (one annealing run, the default) or ``None`` to start from minus
    infinity. When ``node_budget`` runs out the best encoding found so far
    comes back with ``optimal=False``.
    """
    t0 = time.perf_counter()
    protein, dist = as_protein(protein), as_distribution(dist)
    check_consistent(protein, dist)
    sign = direction_sign(direction)
    n = len(protein)
    bounds = suffix_bounds(protein, table, direction)

    if isinstance(incumbent, str):
        if incumbent != "sa":
            raise ValueError(f"unknown incumbent strategy {incumbent!r}")
        p = sa_params or SaParams(restarts=1)
        incumbent = optimize_sa(protein, dist, table, direction, p)[0]
    best_codons: tuple[str, ...] | None = None
    best_val = -math.inf
    if incumbent is not None:
        if extract_codon_distribution(incumbent.sequence) != dist or \
                "".join(_aa(c) for c in incumbent.codons) != str(protein):
            raise ValueError("incumbent does not match protein and distribution")
        best_codons = incumbent.codons
        best_val = sign * total_score(best_codons, table)

    score = table.score
    residual = dict(dist.counts)
    pools = _pools(protein, dist)
    path: list[str] = []
    expanded = pruned = leaves = 0
    exhausted = False

    def children(depth: int, prefix: float, last: str | None):
        out = []
        for c in pools[protein[depth]]:
            if residual[c]:
                step = 0.0 if last is None else sign * score(last, c)
                out.append((prefix + step + bounds.signed(depth, c), step, c))
        out.sort(key=lambda t: (-t[0], t[2]))
        return out

    def dfs(node: BnbNode):
        nonlocal best_codons, best_val, expanded, pruned, leaves, exhausted
        if node.depth == n - 1:
            leaves += 1
            val = sign * total_score(path, table)
            if val > best_val:
                best_val, best_codons = val, tuple(path)
            return
        nxt = node.depth + 1
        for potential, step, c in children(nxt, node.prefix_score, node.last_codon):
            if exhausted:
                return
            if prune and potential < best_val - PRUNE_TOL:
                pruned += 1
                continue
            if node_budget is not None and expanded >= node_budget:
                exhausted = True
                return
            expanded += 1
            residual[c] -= 1
            path.append(c)
            dfs(BnbNode(nxt, node.prefix_score + step, residual, c))
            path.pop()
            residual[c] += 1

    for potential, _, c in children(0, 0.0, None):
        if exhausted:
            break
        if prune and potential < best_val - PRUNE_TOL:
            pruned += 1
            continue
        if node_budget is not None and expanded >= node_budget:
            exhausted = True
            break
        expanded += 1
        residual[c] -= 1
        path.append(c)
        dfs(BnbNode(0, 0.0, residual, c))
        path.pop()
        residual[c] += 1

    if best_codons is None:
        raise RuntimeError("node budget exhausted before any complete encoding was found")
    seq = CodonSeq(best_codons)
    return OptimizationResult(seq, cpb(seq, table), "bnb", direction, not exhausted,
                              {"nodes_expanded": expanded, "nodes_pruned": pruned,
                               "leaves": leaves, "seconds": time.perf_counter() - t0})


def count_encodings(protein, dist) -> int:
    """Multinomial product over amino acids of (positions choose codon counts)."""
    protein, dist = as_protein(protein), as_distribution(dist)
    total = 1
    for aa, cs in dist.per_amino_acid().items():
        m = factorial(sum(cs.values()))
        for k in cs.values():
            m //= factorial(k)
        total *= m
    return total


def enumerate_all(protein, dist, table: CpsTable,
                  cap: int = ENUMERATION_CAP) -> list[tuple[CodonSeq, float]]:
    """Every distinct encoding consistent with ``dist`` and its CPB."""
    protein, dist = as_protein(protein), as_distribution(dist)
    check_consistent(protein, dist)
    count = count_encodings(protein, dist)
    if count > cap:
        raise StateCapExceeded(count, cap)
    pools = _pools(protein, dist)
    residual = dict(dist.counts)
    out: list[tuple[CodonSeq, float]] = []
    path: list[str] = []

    def rec(i: int):
        if i == len(protein):
            seq = CodonSeq(tuple(path))
            out.append((seq, cpb(seq, table)))
            return
        for c in pools[protein[i]]:
            if residual[c]:
                residual[c] -= 1
                path.append(c)
                rec(i + 1)
                path.pop()
                residual[c] += 1

    rec(0)
    return out


def enumerate_unconstrained(protein, table: CpsTable, cap: int = ENUMERATION_CAP):
    """Every synonymous encoding of ``protein`` regardless of codon usage."""
    protein = as_protein(protein)
    layers = [STANDARD_CODE.synonyms(aa) for aa in protein]
    if math.prod(len(x) for x in layers) > cap:
        raise StateCapExceeded(math.prod(len(x) for x in layers), cap)
    return [(CodonSeq(cs), cpb(CodonSeq(cs), table)) for cs in product(*layers)]
