"""Largest |CPS| in tables built from i.i.d. uniform-codon corpora of growing size.

Shows how fast sampling noise in the observed/expected ratio decays.

    python scripts/independence_null.py --pairs 1e5 1e6 1e7
"""

import argparse
import math

import numpy as np

from codonctx.scoring import build_cps_table
from codonctx.seqcore import SENSE_CODONS, CodonSeq


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pairs", type=float, nargs="+", default=[1e5, 1e6])
    ap.add_argument("--record-length", type=int, default=500)
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()

    g = np.random.default_rng(args.seed)
    print("pairs\tmax_abs_cps\tsd_cps\tpredicted_sd")
    for target in args.pairs:
        records = max(1, int(target) // args.record_length)
        idx = g.integers(0, 61, size=(records, args.record_length + 1))
        corpus = [CodonSeq(tuple(SENSE_CODONS[i] for i in row)) for row in idx]
        table, counts = build_cps_table(corpus)
        scores = np.array(list(table.scores.values()))
        # log(O/E) is roughly (O - E)/E with E about N/61^2, so sd about 61/sqrt(N)
        predicted = 61 / math.sqrt(counts.total_pairs)
        print(f"{counts.total_pairs}\t{np.abs(scores).max():.4f}\t{scores.std():.4f}\t{predicted:.4f}")


if __name__ == "__main__":
    main()
