"""``codonctx`` command line: score, pvalue, optimize, build-table, baseline, report.

Exit codes: 0 success, 2 FASTA/sequence error, 3 table error, 4 insufficient
data, 5 resource cap exceeded, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from dataclasses import asdict, dataclass, field, fields
from typing import Any

from .opt_dp import optimize_unconstrained
from .opt_fixed import DEFAULT_STATE_CAP, StateCapExceeded, optimize_bnb, optimize_exact_dp
from .opt_sa import SaParams, optimize_sa
from .scoring import (
    TableError,
    build_cps_table,
    count_pairs,
    cpb,
    effective_number_of_codons,
    format_cps_table,
    normalize_cps,
    read_cps_table,
)
from .seqcore import (
    FastaError,
    SequenceError,
    extract_codon_distribution,
    format_fasta,
    read_fasta,
    translate,
    validate_cds,
)
from .stats import (
    DEFAULT_BASELINE_SAMPLES,
    CpbDistribution,
    DegenerateDistributionError,
    baseline_sample,
    distribution_from_table,
    pvalue,
    significant_interval,
)

EXIT_OK, EXIT_FASTA, EXIT_TABLE, EXIT_DATA, EXIT_CAP, EXIT_USAGE = 0, 2, 3, 4, 5, 64
TABLE_ENV = "CODONCTX_TABLE"


class CliError(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


@dataclass
class Report:
    gene_id: str
    length: int
    n_pairs: int
    cpb: float
    p_value: float | None = None
    interval_95: tuple[float, float] | None = None
    nc: float | None = None
    baseline: dict[str, Any] | None = None
    cpb_range: tuple[float, float] | None = None
    optimizations: list[dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        return {k: v for k, v in d.items() if v is not None and v != []}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Report":
        kw = {f.name: d[f.name] for f in fields(cls) if f.name in d}
        for key in ("interval_95", "cpb_range"):
            if kw.get(key) is not None:
                kw[key] = tuple(kw[key])
        return cls(**kw)

    def check_finite(self) -> None:
        def walk(v):
            if isinstance(v, float) and not math.isfinite(v):
                raise ValueError(f"non-finite value in report for {self.gene_id}")
            if isinstance(v, dict):
                for x in v.values():
                    walk(x)
            elif isinstance(v, (list, tuple)):
                for x in v:
                    walk(x)
        walk(self.to_dict())


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise CliError(EXIT_USAGE, message)


def _load_records(path):
    try:
        records = read_fasta(path)
    except FastaError as e:
        raise CliError(EXIT_FASTA, str(e)) from e
    except OSError as e:
        raise CliError(EXIT_FASTA, str(e)) from e
    out = []
    for name, raw in records:
        try:
            out.append((name, validate_cds(raw).require_pairs()))
        except SequenceError as e:
            raise CliError(EXIT_FASTA, f"record {name!r}: {e}") from e
    return out


def _load_table(args):
    path = args.table or os.environ.get(TABLE_ENV)
    if not path:
        raise CliError(EXIT_USAGE, f"no table given (use --table or set {TABLE_ENV})")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return read_cps_table(path)
    except TableError as e:
        raise CliError(EXIT_TABLE, str(e)) from e


def _distribution(args, table) -> CpbDistribution:
    if args.mean is not None and args.variance is not None:
        return CpbDistribution(args.mean, args.variance, "command line")
    if not table.has_counts:
        raise CliError(EXIT_DATA, "table has no observed counts; pass --mean and --variance")
    d = distribution_from_table(table)
    return CpbDistribution(d.mean if args.mean is None else args.mean,
                           d.variance if args.variance is None else args.variance, d.source)


def _sa_params(args) -> SaParams:
    defaults = SaParams()
    return SaParams(iterations=args.iterations or defaults.iterations,
                    seed=args.seed,
                    restarts=args.restarts or defaults.restarts)


def _base_report(name, seq, table) -> Report:
    return Report(name, len(seq), seq.n_pairs, cpb(seq, table),
                  nc=effective_number_of_codons(seq).nc)


def cmd_score(args) -> list[Report]:
    table = _load_table(args)
    return [_base_report(name, seq, table) for name, seq in _load_records(args.fasta)]


def _add_significance(rep: Report, dist: CpbDistribution) -> None:
    try:
        rep.p_value = pvalue(rep.cpb, rep.n_pairs, dist)
    except DegenerateDistributionError as e:
        raise CliError(EXIT_DATA, str(e)) from e
    rep.interval_95 = significant_interval(rep.n_pairs, 0.05, dist)


def cmd_pvalue(args) -> list[Report]:
    table = _load_table(args)
    dist = _distribution(args, table)
    reports = []
    for name, seq in _load_records(args.fasta):
        rep = _base_report(name, seq, table)
        _add_significance(rep, dist)
        reports.append(rep)
    return reports


def cmd_optimize(args) -> list[Report]:
    if args.method in ("sa", "bnb", "exact") and not args.fix_distribution:
        raise CliError(EXIT_USAGE, f"--method {args.method} requires --fix-distribution")
    if args.method == "dp" and args.fix_distribution:
        raise CliError(EXIT_USAGE, "--method dp optimises without codon constraints; "
                                   "drop --fix-distribution")
    table = _load_table(args)
    reports, recoded = [], []
    for name, seq in _load_records(args.fasta):
        protein, dist = translate(seq), extract_codon_distribution(seq)
        try:
            if args.method == "dp":
                res = optimize_unconstrained(protein, table, args.direction)
            elif args.method == "sa":
                res = optimize_sa(protein, dist, table, args.direction, _sa_params(args))[0]
            elif args.method == "bnb":
                inc = None if args.no_incumbent else "sa"
                res = optimize_bnb(protein, dist, table, args.direction, incumbent=inc,
                                   node_budget=args.node_budget,
                                   sa_params=SaParams(iterations=_sa_params(args).iterations,
                                                      seed=args.seed, restarts=1))
            else:
                res = optimize_exact_dp(protein, dist, table, args.direction,
                                        state_cap=args.state_cap)
        except StateCapExceeded as e:
            raise CliError(EXIT_CAP, f"record {name!r}: {e}") from e
        rep = _base_report(name, seq, table)
        block = {"method": res.method, "direction": res.direction, "cpb": res.cpb,
                 "optimal": res.optimal, "sequence": str(res.sequence)}
        block.update({k: v for k, v in res.stats.items()
                      if k in ("nodes_expanded", "nodes_pruned", "iterations", "restarts",
                               "states", "seconds", "seed")})
        rep.optimizations.append(block)
        reports.append(rep)
        header = f"{name}|method={res.method}|cpb={res.cpb!r}"
        if res.method in ("sa", "bnb"):
            header += f"|seed={args.seed}"
        recoded.append((header, str(res.sequence)))
    fasta = format_fasta(recoded)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(fasta)
    elif not args.json:
        sys.stdout.write(fasta)
    return reports


def cmd_build_table(args) -> list[Report]:
    records = _load_records(args.corpus)
    if not records:
        raise CliError(EXIT_DATA, "empty corpus")
    seqs = [s for _, s in records]
    if args.normalized:
        table = normalize_cps(count_pairs(seqs))
    else:
        table = build_cps_table(seqs, log_base=args.log_base)[0]
    text = format_cps_table(table)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return []


def _baseline_block(protein, dist, seq, table, args) -> tuple[dict, tuple[float, float]]:
    base = baseline_sample(protein, dist, table, args.samples, args.seed)
    gene = cpb(seq, table)
    params = _sa_params(args)
    lo = optimize_sa(protein, dist, table, "min", params)[0].cpb
    hi = optimize_sa(protein, dist, table, "max", params)[0].cpb
    block = {"mean": base.mean, "std": base.std, "samples": base.samples,
             "rank": base.rank(gene)}
    return block, (lo, hi)


def cmd_baseline(args) -> list[Report]:
    if args.samples < 2:
        raise CliError(EXIT_USAGE, "--samples must be >= 2")
    table = _load_table(args)
    reports = []
    for name, seq in _load_records(args.fasta):
        rep = _base_report(name, seq, table)
        protein, dist = translate(seq), extract_codon_distribution(seq)
        rep.baseline, rep.cpb_range = _baseline_block(protein, dist, seq, table, args)
        reports.append(rep)
    return reports


def cmd_report(args) -> list[Report]:
    if args.samples < 2:
        raise CliError(EXIT_USAGE, "--samples must be >= 2")
    table = _load_table(args)
    dist = None
    if (args.mean is not None and args.variance is not None) or table.has_counts:
        dist = _distribution(args, table)
    reports = []
    for name, seq in _load_records(args.fasta):
        rep = _base_report(name, seq, table)
        if dist is not None:
            _add_significance(rep, dist)
        protein, d = translate(seq), extract_codon_distribution(seq)
        rep.baseline, rep.cpb_range = _baseline_block(protein, d, seq, table, args)
        reports.append(rep)
    return reports


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="codonctx", description="Codon pair bias scoring and recoding.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, table=True):
        sp.add_argument("--json", action="store_true", help="emit one JSON document")
        if table:
            sp.add_argument("--table", help=f"CPS table TSV (default: ${TABLE_ENV})")

    def dist_flags(sp):
        sp.add_argument("--mean", type=float)
        sp.add_argument("--variance", type=float)

    def sa_flags(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--iterations", type=int)
        sp.add_argument("--restarts", type=int)

    sp = sub.add_parser("score", help="CPB and effective number of codons per record")
    sp.add_argument("fasta")
    common(sp)
    sp.set_defaults(func=cmd_score)

    sp = sub.add_parser("pvalue", help="two-tailed p-value and 95%% interval per record")
    sp.add_argument("fasta")
    common(sp)
    dist_flags(sp)
    sp.set_defaults(func=cmd_pvalue)

    sp = sub.add_parser("optimize", help="recode records for maximal or minimal CPB")
    sp.add_argument("fasta")
    common(sp)
    sp.add_argument("--method", choices=("dp", "sa", "bnb", "exact"), default="dp")
    sp.add_argument("--direction", choices=("max", "min"), default="max")
    sp.add_argument("--fix-distribution", action="store_true",
                    help="keep each record's codon counts")
    sa_flags(sp)
    sp.add_argument("--node-budget", type=int)
    sp.add_argument("--no-incumbent", action="store_true",
                    help="branch-and-bound starts from minus infinity instead of an SA run")
    sp.add_argument("--state-cap", type=int, default=DEFAULT_STATE_CAP)
    sp.add_argument("--out", help="write recoded FASTA here")
    sp.set_defaults(func=cmd_optimize)

    sp = sub.add_parser("build-table", help="CPS table from a corpus of coding sequences")
    sp.add_argument("corpus")
    common(sp, table=False)
    sp.add_argument("--log-base", type=float, default=math.e)
    sp.add_argument("--normalized", action="store_true",
                    help="base-1.5 scores with per amino-acid-pair normalised expectations")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_build_table)

    for name, func, hlp in (("baseline", cmd_baseline, "random same-distribution designs"),
                            ("report", cmd_report, "full evaluation report")):
        sp = sub.add_parser(name, help=hlp)
        sp.add_argument("fasta")
        common(sp)
        sp.add_argument("--samples", type=int, default=DEFAULT_BASELINE_SAMPLES)
        sa_flags(sp)
        if name == "report":
            dist_flags(sp)
        sp.set_defaults(func=func)
    return p


def _print_text(reports: list[Report]) -> None:
    for r in reports:
        parts = [f"{k}={v}" for k, v in r.to_dict().items() if k != "optimizations"]
        print("\t".join(parts))
        for block in r.optimizations:
            print("\t" + "\t".join(f"{k}={v}" for k, v in block.items() if k != "sequence"))


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        reports = args.func(args)
    except CliError as e:
        print(f"codonctx: error: {e}", file=sys.stderr)
        return e.code
    for r in reports:
        r.check_finite()
    if getattr(args, "json", False):
        if args.command != "build-table":
            json.dump({"records": [r.to_dict() for r in reports]}, sys.stdout, indent=2)
            sys.stdout.write("\n")
    else:
        _print_text(reports)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
