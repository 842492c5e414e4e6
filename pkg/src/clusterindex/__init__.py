"""Sliding and disjoint blocks estimators of cluster indices for regularly
varying time series, with tail-process oracles and a Monte Carlo harness."""

from .estimators import (
    EstimateResult,
    ansjb_diagnostic,
    dh_diagnostic,
    estimate_disjoint,
    estimate_sliding,
    estimate_sliding_pseudo,
    estimate_sliding_quasi,
    s_condition_diagnostic,
    tail_empirical_process,
)
from .functionals import FunctionalSpec, ScaledBlock, disjoint_sum, evaluate, parse_functional, sliding_sum
from .oracle import TailProcessModel, oracle_report
from .series import BlockScheme, Series, Threshold, compute_norms, order_statistic, read_csv, validate_scheme
from .simulate import ProcessSpec, generate, parse_process

__all__ = [
    "BlockScheme", "EstimateResult", "FunctionalSpec", "ProcessSpec", "ScaledBlock", "Series",
    "TailProcessModel", "Threshold", "ansjb_diagnostic", "compute_norms", "dh_diagnostic",
    "disjoint_sum", "estimate_disjoint", "estimate_sliding", "estimate_sliding_pseudo",
    "estimate_sliding_quasi", "evaluate", "generate", "oracle_report", "order_statistic", "parse_functional",
    "parse_process", "read_csv", "s_condition_diagnostic", "sliding_sum", "tail_empirical_process",
    "validate_scheme",
]
