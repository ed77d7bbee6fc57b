"""Forecast data model, probability binning and sufficient statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class DomainError(ValueError):
    """Input outside the domain of an operation."""


class UndefinedCorrectionError(ValueError):
    """A bias-corrected quantity was requested for fewer than two forecasts."""


def _frozen(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ForecastSeries:
    """Paired forecast probabilities and binary outcomes.

    Parameters
    ----------
    p : array_like
        Forecast probabilities, each in [0, 1].
    y : array_like
        Verifying outcomes, each exactly 0 or 1.
    """

    p: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float).ravel()
        y_raw = np.asarray(self.y, dtype=float).ravel()
        if p.size == 0:
            raise DomainError("a forecast series needs at least one pair")
        if p.shape != y_raw.shape:
            raise DomainError(f"length mismatch: {p.size} probabilities, {y_raw.size} outcomes")
        bad = ~((p >= 0.0) & (p <= 1.0))
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise DomainError(f"probability at position {i} is outside [0, 1]: {p[i]!r}")
        bad = ~((y_raw == 0.0) | (y_raw == 1.0))
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise DomainError(f"outcome at position {i} is not 0 or 1: {y_raw[i]!r}")
        object.__setattr__(self, "p", _frozen(p))
        object.__setattr__(self, "y", _frozen(y_raw, dtype=np.int64))

    @property
    def n(self) -> int:
        return int(self.p.size)

    def __len__(self) -> int:
        return self.n


@dataclass(frozen=True)
class BinningScheme:
    """Partition of [0, 1] into bins ``[e0, e1], (e1, e2], ..., (e_{D-1}, e_D]``."""

    edges: tuple

    def __post_init__(self):
        edges = tuple(float(e) for e in self.edges)
        if len(edges) < 2:
            raise DomainError("a binning scheme needs at least one bin")
        if edges[0] != 0.0 or edges[-1] != 1.0:
            raise DomainError(f"bin edges must start at 0 and end at 1, got {edges[0]!r}..{edges[-1]!r}")
        if any(hi <= lo for lo, hi in zip(edges, edges[1:])):
            raise DomainError("bin edges must be strictly increasing")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def equal_width(cls, n_bins: int) -> "BinningScheme":
        if int(n_bins) != n_bins or n_bins < 1:
            raise DomainError(f"number of bins must be a positive integer, got {n_bins!r}")
        n_bins = int(n_bins)
        return cls(tuple(d / n_bins for d in range(n_bins + 1)))

    @property
    def n_bins(self) -> int:
        return len(self.edges) - 1

    def indices(self, p) -> np.ndarray:
        """Zero-based bin index for every probability in `p`."""
        p = np.asarray(p, dtype=float)
        if not np.all((p >= 0.0) & (p <= 1.0)):
            raise DomainError("probabilities must lie in [0, 1]")
        # side="left" puts a value sitting on an interior edge into the lower bin
        idx = np.searchsorted(np.asarray(self.edges), p, side="left")
        return np.maximum(idx, 1) - 1


def bin_index(p: float, scheme: BinningScheme) -> int:
    """Return the 1-based bin number ``d`` containing probability `p`."""
    if not (0.0 <= p <= 1.0):
        raise DomainError(f"probability outside [0, 1]: {p!r}")
    return int(scheme.indices(p)) + 1


@dataclass(frozen=True)
class CountSummary:
    """Per-bin sufficient statistics of a binned forecast series.

    ``a`` counts forecasts per bin, ``b`` counts events per bin, ``c`` sums the
    forecast probabilities per bin; ``s2`` and ``spy`` (sums of p**2 and p*y)
    are only needed for the covariance of the column sums.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    s2: np.ndarray
    spy: np.ndarray
    y_tot: int
    n: int
    scheme: BinningScheme = field(compare=False)

    def __post_init__(self):
        for name in ("a", "b", "c", "s2", "spy"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        if self.a.shape != (self.scheme.n_bins,):
            raise DomainError("per-bin arrays do not match the binning scheme")

    @property
    def n_bins(self) -> int:
        return self.scheme.n_bins

    def __add__(self, other: "CountSummary") -> "CountSummary":
        if self.scheme != other.scheme:
            raise DomainError("cannot merge summaries built on different binning schemes")
        return CountSummary(
            self.a + other.a,
            self.b + other.b,
            self.c + other.c,
            self.s2 + other.s2,
            self.spy + other.spy,
            self.y_tot + other.y_tot,
            self.n + other.n,
            self.scheme,
        )

    def __eq__(self, other):
        if not isinstance(other, CountSummary):
            return NotImplemented
        return (
            self.scheme == other.scheme
            and self.y_tot == other.y_tot
            and self.n == other.n
            and all(
                np.array_equal(getattr(self, k), getattr(other, k))
                for k in ("a", "b", "c", "s2", "spy")
            )
        )

    __hash__ = None


def summarize(series: ForecastSeries, scheme: BinningScheme) -> CountSummary:
    """Accumulate the per-bin sufficient statistics of `series` in one pass."""
    idx = scheme.indices(series.p)
    p = series.p
    y = series.y.astype(float)
    n_bins = scheme.n_bins
    # math.fsum per bin keeps the float sums independent of input order
    order = np.argsort(idx, kind="stable")
    bounds = np.searchsorted(idx[order], np.arange(n_bins + 1))

    def binned_fsum(w):
        w = w[order]
        return [math.fsum(w[lo:hi]) for lo, hi in zip(bounds, bounds[1:])]

    a = np.bincount(idx, minlength=n_bins).astype(float)
    b = np.bincount(idx, weights=y, minlength=n_bins)
    return CountSummary(
        a=a,
        b=b,
        c=binned_fsum(p),
        s2=binned_fsum(p * p),
        spy=binned_fsum(p * y),
        y_tot=int(series.y.sum()),
        n=series.n,
        scheme=scheme,
    )


def empirical_brier(series: ForecastSeries) -> tuple[float, float | None]:
    """Mean squared forecast error and its standard error.

    The standard error is the sample standard deviation of the squared
    residuals divided by sqrt(N); it is ``None`` for a single forecast.
    """
    sq = (series.p - series.y) ** 2
    score = math.fsum(sq) / series.n
    if series.n < 2:
        return score, None
    se = float(np.std(sq, ddof=1)) / math.sqrt(series.n)
    return score, se

