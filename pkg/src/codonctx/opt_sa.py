"""Simulated annealing over same-amino-acid codon swaps with a fixed codon distribution."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numba
import numpy as np

from .result import OptimizationResult, direction_sign
from .scoring import CpsTable, cpb, total_score
from .seqcore import (
    CODON_INDEX,
    SENSE_CODONS,
    STANDARD_CODE,
    CodonSeq,
    as_distribution,
    as_protein,
    check_consistent,
    positions_by_amino_acid,
    random_synonymous_encoding,
)

CHECKPOINTS = 1000


@dataclass(frozen=True)
class SaParams:
    """Annealing schedule.

    The temperature is in pair-score-total units and is multiplied by
    ``cooling_factor`` every ``iterations // 1000`` steps. Restart ``r`` uses
    seed ``seed + r``.
    """

    iterations: int = 500_000
    initial_temperature: float = 1.0
    cooling_factor: float = 0.995
    seed: int = 0
    restarts: int = 5

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not 0 < self.cooling_factor < 1:
            raise ValueError("cooling_factor must lie in (0, 1)")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if not self.initial_temperature > 0:
            raise ValueError("initial_temperature must be > 0")

    @property
    def step(self) -> int:
        return max(1, self.iterations // CHECKPOINTS)


@dataclass
class SaTrace:
    """Checkpoint rows: restart, iteration, current CPB, best CPB, temperature, accepted moves."""

    restart: list[int] = field(default_factory=list)
    iteration: list[int] = field(default_factory=list)
    current: list[float] = field(default_factory=list)
    best: list[float] = field(default_factory=list)
    temperature: list[float] = field(default_factory=list)
    accepted: list[int] = field(default_factory=list)
    # codon-index snapshots per checkpoint, only when requested
    snapshots: list[np.ndarray] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.iteration)

    def to_tsv(self) -> str:
        rows = ["iteration\tcurrent\tbest\ttemperature\taccepted\trestart"]
        for r in zip(self.iteration, self.current, self.best, self.temperature,
                     self.accepted, self.restart):
            rows.append("\t".join(map(repr, r)))
        return "\n".join(rows) + "\n"


@numba.njit(cache=True)
def _anneal(codons, scores, group_pos, group_off, iterations, t0, cooling, step, seed,
            keep_snapshots):
    np.random.seed(seed)
    n = codons.shape[0]
    cur = codons.copy()
    total = 0.0
    for k in range(n - 1):
        total += scores[cur[k], cur[k + 1]]
    best_total = total
    best = cur.copy()
    n_groups = group_off.shape[0] - 1
    n_ck = iterations // step
    ck_iter = np.zeros(n_ck, np.int64)
    ck_cur = np.zeros(n_ck)
    ck_best = np.zeros(n_ck)
    ck_temp = np.zeros(n_ck)
    ck_acc = np.zeros(n_ck, np.int64)
    snaps = np.zeros((n_ck if keep_snapshots else 0, n), np.int64)
    temp = t0
    accepted = 0
    evals = 0
    ks = np.empty(4, np.int64)
    ck = 0
    for it in range(iterations):
        if it > 0 and it % step == 0:
            temp *= cooling
        g = np.random.randint(n_groups)
        lo = group_off[g]
        m = group_off[g + 1] - lo
        a = np.random.randint(m)
        b = np.random.randint(m - 1)
        if b >= a:
            b += 1
        i = group_pos[lo + a]
        j = group_pos[lo + b]
        if i > j:
            i, j = j, i
        ci = cur[i]
        cj = cur[j]
        if ci != cj:
            nk = 0
            if i >= 1:
                ks[nk] = i - 1
                nk += 1
            ks[nk] = i
            nk += 1
            if j - 1 != i:
                ks[nk] = j - 1
                nk += 1
            if j <= n - 2:
                ks[nk] = j
                nk += 1
            before = 0.0
            after = 0.0
            for q in range(nk):
                k = ks[q]
                before += scores[cur[k], cur[k + 1]]
                x = cj if k == i else (ci if k == j else cur[k])
                y = cj if k + 1 == i else (ci if k + 1 == j else cur[k + 1])
                after += scores[x, y]
            evals += 2 * nk
            delta = after - before
            if delta > 0.0 or np.random.random() < math.exp(delta / temp):
                cur[i] = cj
                cur[j] = ci
                total += delta
                accepted += 1
                if total > best_total:
                    best_total = total
                    best[:] = cur
        if (it + 1) % step == 0 and ck < n_ck:
            ck_iter[ck] = it + 1
            ck_cur[ck] = total
            ck_best[ck] = best_total
            ck_temp[ck] = temp
            ck_acc[ck] = accepted
            if keep_snapshots:
                snaps[ck, :] = cur
            ck += 1
    return best, cur, total, accepted, evals, ck_iter, ck_cur, ck_best, ck_temp, ck_acc, snaps


def _swap_groups(protein, dist_counts) -> tuple[np.ndarray, np.ndarray]:
    """Positions of amino acids that occur twice or more with at least two distinct codons."""
    pos, off = [], [0]
    for aa, ps in sorted(positions_by_amino_acid(protein).items()):
        used = sum(1 for c, n in dist_counts.items() if n and c in _SYN[aa])
        if len(ps) >= 2 and used >= 2:
            pos.extend(ps)
            off.append(len(pos))
    return np.asarray(pos, np.int64), np.asarray(off, np.int64)


_SYN = {aa: set(cs) for aa, cs in STANDARD_CODE.amino_acid_to_codons.items()}


def optimize_sa(protein, dist, table: CpsTable, direction: str = "max",
                params: SaParams | None = None, keep_snapshots: bool = False,
                ) -> tuple[OptimizationResult, SaTrace]:
    """Anneal ``params.restarts`` independent runs and keep the best encoding.

    Each run starts from a seeded random encoding honouring ``dist``. A move
    picks an amino acid, then two of its positions; different codons there
    are exchanged if that improves the total score, otherwise with
    probability ``exp(delta / T)``. Drawing two identical codons still uses
    up the iteration.
    """
    t_start = time.perf_counter()
    params = params or SaParams()
    protein, dist = as_protein(protein), as_distribution(dist)
    check_consistent(protein, dist)
    sign = direction_sign(direction)
    n_pairs = len(protein) - 1
    group_pos, group_off = _swap_groups(protein, dist.counts)
    trace = SaTrace()

    if len(group_off) < 2:
        seq = random_synonymous_encoding(protein, dist, params.seed)
        value = cpb(seq, table)
        return OptimizationResult(seq, value, "sa", direction, True,
                                  {"iterations": 0, "restarts": 0, "accepted": 0,
                                   "pair_evaluations": 0, "seed": params.seed,
                                   "best_restart": 0, "restart_cpbs": [value],
                                   "incremental_drift": 0.0,
                                   "seconds": time.perf_counter() - t_start}), trace

    scores = np.ascontiguousarray(sign * table.matrix)
    best_seq, best_val, best_r = None, -math.inf, -1
    accepted = evals = 0
    restart_cpbs = []
    for r in range(params.restarts):
        seed = params.seed + r
        init = random_synonymous_encoding(protein, dist, seed)
        idx = np.fromiter((CODON_INDEX[c] for c in init), np.int64, len(init))
        (best, cur, total, acc, ev, ck_iter, ck_cur, ck_best, ck_temp, ck_acc,
         snaps) = _anneal(idx, scores, group_pos, group_off, params.iterations,
                          params.initial_temperature, params.cooling_factor, params.step,
                          seed % 2**32, keep_snapshots)
        accepted += int(acc)
        evals += int(ev)
        trace.restart.extend([r] * len(ck_iter))
        trace.iteration.extend(int(x) for x in ck_iter)
        trace.current.extend(float(sign * x / n_pairs) for x in ck_cur)
        trace.best.extend(float(sign * x / n_pairs) for x in ck_best)
        trace.temperature.extend(float(x) for x in ck_temp)
        trace.accepted.extend(int(x) for x in ck_acc)
        trace.snapshots.extend(snaps)
        codons = tuple(SENSE_CODONS[k] for k in best)
        val = sign * total_score(codons, table)
        restart_cpbs.append(sign * val / n_pairs)
        if val > best_val:
            best_seq, best_val, best_r = codons, val, r
        if r == params.restarts - 1:
            final_codons = tuple(SENSE_CODONS[k] for k in cur)
            drift = abs(total - sign * total_score(final_codons, table))

    seq = CodonSeq(best_seq)
    stats = {"iterations": params.iterations, "restarts": params.restarts,
             "accepted": accepted, "pair_evaluations": evals, "seed": params.seed,
             "best_restart": best_r, "restart_cpbs": restart_cpbs,
             "incremental_drift": drift, "seconds": time.perf_counter() - t_start}
    return OptimizationResult(seq, cpb(seq, table), "sa", direction, False, stats), trace
