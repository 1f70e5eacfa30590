"""Branch-and-bound node counts and runtime against prefix length on a random table.

    python scripts/bnb_scaling.py --max-length 16 --seeds 10
"""

import argparse
import random
import time

import numpy as np

from codonctx.opt_fixed import optimize_bnb
from codonctx.scoring import CpsTable
from codonctx.seqcore import SENSE_CODONS, STANDARD_CODE, extract_codon_distribution, translate


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--min-length", type=int, default=6)
    ap.add_argument("--max-length", type=int, default=14)
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--alphabet", default="LSRAGVPT")
    ap.add_argument("--incumbent", choices=("none", "sa"), default="none")
    args = ap.parse_args()

    rng = random.Random(2024)
    table = CpsTable({(a, b): rng.gauss(0, 0.5) for a in SENSE_CODONS for b in SENSE_CODONS})
    lengths = range(args.min_length, args.max_length + 1)
    nodes = np.zeros((args.seeds, len(lengths)))
    secs = np.zeros_like(nodes)
    for s in range(args.seeds):
        r = random.Random(s)
        gene = [r.choice(STANDARD_CODE.synonyms(r.choice(args.alphabet)))
                for _ in range(args.max_length)]
        for k, n in enumerate(lengths):
            pre = gene[:n]
            t0 = time.perf_counter()
            res = optimize_bnb(translate(pre), extract_codon_distribution(pre), table,
                               incumbent=None if args.incumbent == "none" else "sa")
            secs[s, k] = time.perf_counter() - t0
            nodes[s, k] = res.stats["nodes_expanded"]

    print("length\tnodes_geomean\tnodes_max\tseconds_mean")
    for k, n in enumerate(lengths):
        print(f"{n}\t{np.exp(np.log(nodes[:, k]).mean()):.1f}\t{nodes[:, k].max():.0f}"
              f"\t{secs[:, k].mean():.4f}")


if __name__ == "__main__":
    main()
