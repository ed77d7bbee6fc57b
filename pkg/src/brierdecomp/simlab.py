"""Monte Carlo experiments on an artificial forecast scheme with known components.

The event probability q is drawn uniformly from six values; the forecast
equals q except for the largest value, which is forecast as 1. Each trial
draws its own random stream from ``(seed, n, trial)``, so results do not
depend on the order in which trials are run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .core import BinningScheme, ForecastSeries, summarize
from .decomp import component_estimates
from .variance import ESTIMATORS, variance_estimates

EVENT_PROBS = (0.05, 0.15, 0.25, 0.35, 0.45, 0.55)
FORECASTS = (0.05, 0.15, 0.25, 0.35, 0.45, 1.0)
# each forecast value gets a bin of its own
SCHEME = BinningScheme((0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 1.0))


class InsufficientDataError(ValueError):
    pass


def true_components() -> tuple[float, float, float]:
    """Exact (REL, RES, UNC) of the artificial scheme."""
    q = [Fraction(str(v)) for v in EVENT_PROBS]
    p = [Fraction(str(v)) for v in FORECASTS]
    clim = sum(q) / len(q)
    rel = sum((pi - qi) ** 2 for pi, qi in zip(p, q)) / len(q)
    res = sum((qi - clim) ** 2 for qi in q) / len(q)
    unc = clim * (1 - clim)
    return float(rel), float(res), float(unc)


def estimator_truths() -> dict:
    """True value targeted by each of the six estimators."""
    rel, res, unc = true_components()
    return {"rel": rel, "res": res, "unc": unc, "rel_bc": rel, "res_bc": res, "unc_bc": unc}


def trial_rng(seed: int, n: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(n, trial)))


def sample_trial(n: int, rng: np.random.Generator) -> ForecastSeries:
    if n < 1:
        raise ValueError(f"trial size must be positive, got {n}")
    d = rng.integers(0, len(EVENT_PROBS), size=n)
    y = rng.random(n) < np.asarray(EVENT_PROBS)[d]
    return ForecastSeries(np.asarray(FORECASTS)[d], y.astype(np.int64))


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    estimates: dict
    variances: dict


def run_trial(n: int, seed: int, trial: int) -> TrialRecord:
    counts = summarize(sample_trial(n, trial_rng(seed, n, trial)), SCHEME)
    est = component_estimates(counts.a, counts.b, counts.c, counts.y_tot, counts.n)
    var = variance_estimates(counts).as_dict()
    return TrialRecord(trial, est, var)


def run_experiment(trials: int, n: int, seed: int) -> list[TrialRecord]:
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    if n < 2:
        raise ValueError(f"trial size must be at least 2, got {n}")
    return [run_trial(n, seed, i) for i in range(trials)]


@dataclass(frozen=True)
class SummaryRow:
    sample_variance: float
    mean_estimated_variance: float
    mean_squared_error: float
    mean_bias: float

    def as_dict(self) -> dict:
        return {
            "sample_variance": self.sample_variance,
            "mean_estimated_variance": self.mean_estimated_variance,
            "mean_squared_error": self.mean_squared_error,
            "mean_bias": self.mean_bias,
        }


def _column(records, attr, name) -> np.ndarray:
    # sorted by trial index so the summary ignores record order
    ordered = sorted(records, key=lambda r: r.trial)
    return np.array([getattr(r, attr)[name] for r in ordered])


def _mean(x) -> float:
    return math.fsum(x) / len(x)


def summarize_trials(records: Sequence[TrialRecord], truths: Mapping[str, float]) -> dict:
    """Per-estimator sample variance, mean estimated variance, mean squared
    error and mean bias; every average divides by the number of trials."""
    if len(records) < 2:
        raise InsufficientDataError(f"need at least 2 trials to summarize, got {len(records)}")
    out = {}
    for name in ESTIMATORS:
        est = _column(records, "estimates", name)
        var = _column(records, "variances", name)
        m = _mean(est)
        out[name] = SummaryRow(
            sample_variance=_mean((est - m) ** 2),
            mean_estimated_variance=_mean(var),
            mean_squared_error=_mean((est - truths[name]) ** 2),
            mean_bias=_mean(est - truths[name]),
        )
    return out


def coverage(records: Sequence[TrialRecord], truths: Mapping[str, float], k: float = 2.0) -> dict:
    """Number of trials whose interval ``estimate +- k * sd`` contains the truth."""
    if not k > 0:
        raise ValueError(f"interval half-width must be positive, got {k}")
    out = {}
    for name in ESTIMATORS:
        est = _column(records, "estimates", name)
        sd = np.sqrt(_column(records, "variances", name))
        out[name] = int(np.count_nonzero(np.abs(est - truths[name]) <= k * sd))
    return out


def loglog_slope(n_grid, values) -> float:
    """Least-squares slope of log(values) against log(n_grid)."""
    slope, _ = np.polyfit(np.log(np.asarray(n_grid, float)), np.log(np.asarray(values, float)), 1)
    return float(slope)


@dataclass(frozen=True)
class ConvergenceResult:
    n_grid: tuple
    # per estimator, one mean absolute difference per grid point
    mean_abs_diff: dict
    slopes: dict


def variance_error(records: Sequence[TrialRecord]) -> dict:
    """Mean over trials of ``|estimated variance - sample variance|`` per estimator."""
    out = {}
    for name in ESTIMATORS:
        est = _column(records, "estimates", name)
        var = _column(records, "variances", name)
        sample_var = _mean((est - _mean(est)) ** 2)
        out[name] = _mean(np.abs(var - sample_var))
    return out


def convergence_study(n_grid: Sequence[int], trials: int, seed: int) -> ConvergenceResult:
    grid = sorted({int(v) for v in n_grid})
    if len(grid) < 3:
        raise ValueError("convergence study needs at least 3 distinct sample sizes")
    if grid[-1] < 10 * grid[0]:
        raise ValueError("sample sizes must span at least one decade")
    if trials < 2:
        raise InsufficientDataError("convergence study needs at least 2 trials per size")
    diffs = {name: [] for name in ESTIMATORS}
    for n in grid:
        for name, v in variance_error(run_experiment(trials, n, seed)).items():
            diffs[name].append(v)
    slopes = {name: loglog_slope(grid, diffs[name]) for name in ESTIMATORS}
    return ConvergenceResult(tuple(grid), {k: tuple(v) for k, v in diffs.items()}, slopes)
