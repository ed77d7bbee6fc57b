"""Brier score decomposition with first-order sampling variances."""

from .core import (
    BinningScheme,
    CountSummary,
    DomainError,
    ForecastSeries,
    UndefinedCorrectionError,
    bin_index,
    empirical_brier,
    summarize,
)
from .decomp import (
    Decomposition,
    consistency_correct,
    decompose_all,
    decompose_bias_corrected,
    decompose_traditional,
)
from .variance import VarianceSet, covariance_of_sums, jacobians, variance_estimates

__all__ = [
    "BinningScheme",
    "CountSummary",
    "Decomposition",
    "DomainError",
    "ForecastSeries",
    "UndefinedCorrectionError",
    "VarianceSet",
    "bin_index",
    "consistency_correct",
    "covariance_of_sums",
    "decompose_all",
    "decompose_bias_corrected",
    "decompose_traditional",
    "empirical_brier",
    "jacobians",
    "summarize",
    "variance_estimates",
]

__version__ = "0.1.0"
