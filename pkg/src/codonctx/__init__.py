"""Codon pair bias scoring, significance and CPB-optimal recoding."""

from .opt_dp import optimize_unconstrained, suffix_bounds
from .opt_fixed import enumerate_all, optimize_bnb, optimize_exact_dp
from .opt_sa import SaParams, optimize_sa
from .result import OptimizationResult
from .scoring import (
    CpsTable,
    build_cps_table,
    cpb,
    cpb_delta_swap,
    effective_number_of_codons,
    normalize_cps,
    read_cps_table,
    write_cps_table,
)
from .seqcore import (
    AminoAcidSeq,
    CodonDistribution,
    CodonSeq,
    extract_codon_distribution,
    parse_fasta,
    random_synonymous_encoding,
    translate,
    validate_cds,
)
from .stats import (
    CpbDistribution,
    baseline_sample,
    distribution_from_table,
    pvalue,
    significant_interval,
)

__version__ = "0.1.0"
