"""Exact geometry of optimal LCS alignments, cut-vector events, rate-curve
Monte Carlo, and concentration-bound arithmetic."""

from .blocks import (
    BlockPartition,
    EventAParams,
    EventAReport,
    best_partition,
    check_event_A,
    constrained_score,
    empirical_lemma_gap,
    enumerate_optimal_partitions,
)
from .bounds import (
    BoundReport,
    TheoremParams,
    binom_upper,
    cardinality_bound_improved,
    entropy_e,
    feasibility_report,
    g_function,
    improved_conditions,
    least_k_exceeding,
    required_q_basic,
    thm1_bound,
    thm2_bound,
    thm3_bound,
)
from .core import (
    AlphabetDistribution,
    ScoreTable,
    Sequence,
    StringPair,
    backtrace,
    lcs_length,
    prefix_table,
    sample_pair,
    suffix_table,
)
from .errors import ConfigError, LcsgeomError, ResourceError, UsageError
from .gamma import (
    DeltaEstimate,
    GammaCurve,
    GammaEstimate,
    convert_p_to_q,
    convert_q_to_p,
    estimate_delta,
    estimate_gamma_q,
    estimate_gamma_star,
    sweep_curve,
)
from .geometry import (
    BandCheck,
    DiagonalBand,
    Envelope,
    check_diagonal_event,
    envelope,
    export_figure,
    match_points,
)
from .properties import (
    EventBReport,
    PropertySpec,
    QkEstimate,
    bound_event_B,
    check_event_B,
    estimate_qk,
    evaluate_property,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
