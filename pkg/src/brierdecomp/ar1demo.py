"""Seasonal-cycle regression, AR(1) exceedance forecasts and threshold sweeps
for daily temperature series."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import BinningScheme, ForecastSeries, empirical_brier, summarize
from .decomp import decompose_all
from .variance import VarianceSet, variance_estimates

OMEGA = 2.0 * math.pi / 365.2425
# day index of 1 January 1980, counted from 1 January 1970
DAY_1980 = 3652


class RankDeficientError(ValueError):
    pass


class DegenerateSeriesError(ValueError):
    pass


class DegenerateForecastError(ValueError):
    pass


@dataclass(frozen=True)
class DailySeries:
    """Daily values indexed by integer day number (days since 1970-01-01)."""

    day: np.ndarray
    temp: np.ndarray

    def __post_init__(self):
        day = np.asarray(self.day)
        if day.size and not np.all(np.equal(np.mod(day, 1), 0)):
            raise ValueError("day indices must be integers")
        day = day.astype(np.int64)
        temp = np.asarray(self.temp, dtype=float)
        if day.shape != temp.shape or day.ndim != 1:
            raise ValueError("day and temperature arrays must be 1-d and of equal length")
        if np.any(np.diff(day) <= 0):
            i = int(np.flatnonzero(np.diff(day) <= 0)[0]) + 1
            raise ValueError(f"day indices must be strictly increasing (position {i}, day {day[i]})")
        if not np.all(np.isfinite(temp)):
            raise ValueError("temperatures must be finite")
        day.setflags(write=False)
        temp.setflags(write=False)
        object.__setattr__(self, "day", day)
        object.__setattr__(self, "temp", temp)

    def __len__(self):
        return int(self.day.size)

    @property
    def gaps(self) -> int:
        """Number of places where consecutive records are more than one day apart."""
        return int(np.count_nonzero(np.diff(self.day) > 1))

    def split(self, first_test_day: int) -> tuple["DailySeries", "DailySeries"]:
        m = self.day < first_test_day
        return DailySeries(self.day[m], self.temp[m]), DailySeries(self.day[~m], self.temp[~m])


@dataclass(frozen=True)
class SeasonalModel:
    beta: tuple

    def __post_init__(self):
        beta = tuple(float(b) for b in self.beta)
        if len(beta) != 5:
            raise ValueError(f"seasonal model needs 5 coefficients, got {len(beta)}")
        object.__setattr__(self, "beta", beta)

    omega = OMEGA

    def cycle(self, day) -> np.ndarray:
        return design_matrix(day) @ np.asarray(self.beta)


@dataclass(frozen=True)
class Ar1Model:
    alpha: float
    sigma: float

    @property
    def stationary_variance(self) -> float:
        return self.sigma**2 / (1.0 - self.alpha**2)


def design_matrix(day) -> np.ndarray:
    wn = OMEGA * np.asarray(day, dtype=float)
    return np.column_stack([np.ones_like(wn), np.cos(wn), np.sin(wn), np.cos(2 * wn), np.sin(2 * wn)])


def fit_seasonal(series: DailySeries) -> SeasonalModel:
    """Least-squares fit of a second-order trigonometric polynomial of the day index."""
    x = design_matrix(series.day)
    if len(series) < 5 or np.linalg.matrix_rank(x) < 5:
        raise RankDeficientError("seasonal regression needs at least 5 distinct days")
    # normal equations; np.linalg.solve factorizes with partial pivoting
    beta = np.linalg.solve(x.T @ x, x.T @ series.temp)
    return SeasonalModel(tuple(beta))


def anomalies(series: DailySeries, model: SeasonalModel) -> DailySeries:
    return DailySeries(series.day, series.temp - model.cycle(series.day))


def fit_ar1(anom: DailySeries) -> Ar1Model:
    """Yule-Walker AR(1) fit; only pairs of consecutive days enter the lag-1 term."""
    x = anom.temp
    n = x.size
    consecutive = np.diff(anom.day) == 1
    if n < 3 or np.count_nonzero(consecutive) < 2:
        raise ValueError("AR(1) fit needs at least 2 pairs of consecutive days")
    dev = x - np.mean(x)
    c0 = float(np.dot(dev, dev)) / n
    scale = max(1.0, float(np.max(np.abs(x))))
    if c0 <= (1e-12 * scale) ** 2:
        raise DegenerateSeriesError("anomaly series is constant; AR(1) coefficient undefined")
    prod = dev[:-1][consecutive] * dev[1:][consecutive]
    # rescale the pair average to the usual divisor-n lag-1 autocovariance
    c1 = float(np.mean(prod)) * (n - 1) / n
    alpha = c1 / c0
    return Ar1Model(alpha=alpha, sigma=math.sqrt(c0 * (1.0 - alpha**2)))


def normal_cdf(x):
    """Standard Gaussian distribution function."""
    if np.ndim(x) == 0:
        return 0.5 * math.erfc(-float(x) / math.sqrt(2.0))
    return np.array([0.5 * math.erfc(-v / math.sqrt(2.0)) for v in np.ravel(x)]).reshape(np.shape(x))


def exceedance_forecast(model: Ar1Model, previous, threshold: float):
    """Probability that the next anomaly exceeds `threshold` given the current one."""
    if not model.sigma > 0:
        raise DegenerateForecastError("exceedance forecast needs a positive noise level")
    if not abs(model.alpha) < 1:
        raise DegenerateForecastError(f"AR(1) coefficient {model.alpha!r} is not stationary")
    z = (threshold - model.alpha * np.asarray(previous, dtype=float)) / model.sigma
    # 1 - Phi(z) == Phi(-z), which keeps precision in the upper tail
    return normal_cdf(-z)


def generate_synthetic(
    seasonal: SeasonalModel, ar1: Ar1Model, days: int, seed: int, start_day: int = DAY_1980
) -> DailySeries:
    """Seasonal cycle plus a stationary AR(1) anomaly process."""
    if not abs(ar1.alpha) < 1:
        raise ValueError(f"AR(1) coefficient {ar1.alpha!r} is not stationary")
    if ar1.sigma < 0:
        raise ValueError("noise level must be non-negative")
    if days < 1:
        raise ValueError("need at least one day")
    rng = np.random.default_rng(seed)
    eps = rng.standard_normal(days)
    anom = np.empty(days)
    anom[0] = math.sqrt(ar1.stationary_variance) * eps[0]
    for i in range(1, days):
        anom[i] = ar1.alpha * anom[i - 1] + ar1.sigma * eps[i]
    day = np.arange(start_day, start_day + days)
    return DailySeries(day, seasonal.cycle(day) + anom)


@dataclass(frozen=True)
class FittedModels:
    seasonal: SeasonalModel
    ar1: Ar1Model


@dataclass(frozen=True)
class SweepRow:
    threshold: float
    n: int
    skipped: int
    brier: float
    brier_se: Optional[float]
    decompositions: dict
    variances: VarianceSet


def forecast_pairs(models: FittedModels, test: DailySeries, threshold: float):
    """Forecast probabilities and outcomes for every test day whose previous day is present.

    Returns ``(series, skipped)``.
    """
    anom = anomalies(test, models.seasonal).temp
    has_prev = np.diff(test.day) == 1
    skipped = len(test) - int(np.count_nonzero(has_prev))
    p = exceedance_forecast(models.ar1, anom[:-1][has_prev], threshold)
    y = (anom[1:][has_prev] > threshold).astype(np.int64)
    return ForecastSeries(p, y), skipped


def fit_models(train: DailySeries) -> FittedModels:
    seasonal = fit_seasonal(train)
    return FittedModels(seasonal, fit_ar1(anomalies(train, seasonal)))


def threshold_sweep(
    train: DailySeries, test: DailySeries, thresholds: Sequence[float], bins: int = 10
) -> tuple[FittedModels, list[SweepRow]]:
    """Fit on `train`, then verify exceedance forecasts on `test` for each threshold."""
    models = fit_models(train)
    scheme = BinningScheme.equal_width(bins)
    rows = []
    for tau in thresholds:
        series, skipped = forecast_pairs(models, test, float(tau))
        counts = summarize(series, scheme)
        brier, se = empirical_brier(series)
        rows.append(
            SweepRow(
                threshold=float(tau),
                n=series.n,
                skipped=skipped,
                brier=brier,
                brier_se=se,
                decompositions=decompose_all(counts),
                variances=variance_estimates(counts),
            )
        )
    return models, rows
