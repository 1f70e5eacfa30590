"""How often annealing reaches the exact fixed-distribution optimum, by iteration budget.

    python scripts/sa_vs_exact.py --instances 100 --iterations 1000 10000 100000
"""

import argparse
import random
import sys
import time
from pathlib import Path

from codonctx.opt_fixed import optimize_exact_dp
from codonctx.opt_sa import SaParams, optimize_sa

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
from conftest import random_instance  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--instances", type=int, default=100)
    ap.add_argument("--max-length", type=int, default=12)
    ap.add_argument("--iterations", type=int, nargs="+", default=[1_000, 10_000, 100_000])
    ap.add_argument("--restarts", type=int, default=5)
    args = ap.parse_args()

    cases = []
    for seed in range(args.instances):
        protein, dist, table, _ = random_instance(random.Random(seed), args.max_length)
        cases.append((protein, dist, table, optimize_exact_dp(protein, dist, table).cpb))

    print("iterations\thit_rate\tmean_gap\tseconds_per_run")
    for it in args.iterations:
        hits, gap = 0, 0.0
        t0 = time.perf_counter()
        for seed, (protein, dist, table, opt) in enumerate(cases):
            got = optimize_sa(protein, dist, table,
                              params=SaParams(iterations=it, restarts=args.restarts, seed=seed))[0].cpb
            hits += got == opt
            gap += opt - got
        dt = (time.perf_counter() - t0) / len(cases)
        print(f"{it}\t{hits / len(cases):.3f}\t{gap / len(cases):.2e}\t{dt:.3f}")


if __name__ == "__main__":
    main()
