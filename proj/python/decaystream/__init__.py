"""Clustering summaries for time-decayed data streams."""

from ._decaystream import (
    ALPHA,
    LimitError,
    PolyDecaySketch,
    approximation_bound,
    block_count_bound,
    block_weight,
    cluster_exponential,
    compute_marker,
    decayed_cost,
    exhaustive_kmedian,
    verify_coreset,
)

__all__ = [
    "ALPHA",
    "LimitError",
    "PolyDecaySketch",
    "approximation_bound",
    "block_count_bound",
    "block_weight",
    "cluster_exponential",
    "compute_marker",
    "decayed_cost",
    "exhaustive_kmedian",
    "verify_coreset",
]
