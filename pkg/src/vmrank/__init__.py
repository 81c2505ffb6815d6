"""Rank cloud VMs for an application from benchmark data and group weights."""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .catalog import (
    AttributeDefinition,
    Catalog,
    MeasurementMatrix,
    MeasurementRun,
    VMProfile,
    ingest_runs,
    load_catalog,
    load_matrix,
    read_runs,
    save_catalog,
)
from .ranking import P, PC, RankingResult, rank, rank_performance, rank_performance_cost
from .scoring import (
    AGGREGATE,
    FINE_GRAIN,
    PARALLEL,
    SEQUENTIAL,
    WeightVector,
    apply_parallel_adjustment,
    expand_weights,
    load_weights,
    normalize,
    prepare,
    score,
)
from .validation import (
    EmpiricalObservation,
    ValidationReport,
    compare,
    empirical_rank,
    hamming_score,
    pearson_correlation,
)
from .weightspace import WeightSpaceSpec, enumerate_weights, score_curve, top_k_frequency
