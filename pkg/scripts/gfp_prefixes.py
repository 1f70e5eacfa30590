"""Maximal CPB of GFP prefixes under the wild-type codon distribution (BnB and SA).

Needs a human CPS table in the scoring TSV format and the GFP coding sequence:

    python scripts/gfp_prefixes.py --table human_cps.tsv --gfp gfp.fa --lengths 10 20 30
"""

import argparse
import time

from codonctx.opt_fixed import optimize_bnb
from codonctx.opt_sa import SaParams, optimize_sa
from codonctx.scoring import read_cps_table
from codonctx.seqcore import extract_codon_distribution, read_fasta, translate, validate_cds


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--table", required=True)
    ap.add_argument("--gfp", required=True)
    ap.add_argument("--lengths", type=int, nargs="+", default=[10, 20, 30, 40, 50, 60, 70])
    ap.add_argument("--node-budget", type=int)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    table = read_cps_table(args.table)
    gene = validate_cds(read_fasta(args.gfp)[0][1])
    print("length\tbnb_cpb\tbnb_optimal\tbnb_seconds\tsa_cpb\tsa_seconds")
    for n in args.lengths:
        pre = gene.codons[:n]
        protein, dist = translate(pre), extract_codon_distribution(pre)
        t0 = time.perf_counter()
        sa = optimize_sa(protein, dist, table, params=SaParams(seed=args.seed))[0]
        t_sa = time.perf_counter() - t0
        t0 = time.perf_counter()
        bnb = optimize_bnb(protein, dist, table, incumbent=sa, node_budget=args.node_budget)
        t_bnb = time.perf_counter() - t0
        print(f"{n}\t{bnb.cpb!r}\t{bnb.optimal}\t{t_bnb:.3f}\t{sa.cpb!r}\t{t_sa:.3f}", flush=True)


if __name__ == "__main__":
    main()
