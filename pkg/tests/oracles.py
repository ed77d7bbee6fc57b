"""Shared test oracles.

Everything here is deliberately independent of the code paths under test:
bin membership is decided by explicit interval checks, the indicator matrix
is materialized row by row, and gradients come from central differences.
"""

import numpy as np

from brierdecomp.core import BinningScheme, CountSummary, ForecastSeries
from brierdecomp.decomp import component_estimates


def oracle_bin(p, edges):
    """0-based bin of p: first bin closed, later bins open on the left."""
    if edges[0] <= p <= edges[1]:
        return 0
    for d in range(1, len(edges) - 1):
        if edges[d] < p <= edges[d + 1]:
            return d
    raise AssertionError(f"{p} not covered by {edges}")


def indicator_matrix(series: ForecastSeries, scheme: BinningScheme) -> np.ndarray:
    """The N x (3D+1) matrix [A | B | C | Y] built one forecast at a time."""
    D = scheme.n_bins
    X = np.zeros((series.n, 3 * D + 1))
    for i, (p, y) in enumerate(zip(series.p.tolist(), series.y.tolist())):
        d = oracle_bin(p, scheme.edges)
        X[i, d] = 1.0
        X[i, D + d] = y
        X[i, 2 * D + d] = p
        X[i, 3 * D] = y
    return X


def brute_force_covariance(X: np.ndarray) -> np.ndarray:
    n = X.shape[0]
    centering = np.eye(n) - np.ones((n, n)) / n
    return X.T @ centering @ X


def fd_gradient(a, b, c, y_tot, n, name, h=1e-5):
    """Central-difference gradient of one estimator in stacked coordinates."""
    D = len(a)
    x = np.concatenate([a, b, c, [y_tot]]).astype(float)

    def f(v):
        return component_estimates(v[:D], v[D:2 * D], v[2 * D:3 * D], v[3 * D], n)[name]

    g = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def random_nondegenerate_sums(rng, n_bins):
    """Column sums with every bin holding >= 2 forecasts and a mix of outcomes."""
    a = rng.integers(2, 60, size=n_bins).astype(float)
    b = np.array([rng.integers(1, int(ai)) for ai in a], dtype=float)
    c = a * rng.uniform(0.02, 0.98, size=n_bins)
    return a, b, c, float(b.sum()), float(a.sum())


def random_series(rng, n, constant_within_bins=False, scheme=None, base_rate=None):
    """Random forecasts; optionally one probability value per bin."""
    if constant_within_bins:
        edges = np.asarray(scheme.edges)
        # one value strictly inside (or on the right edge of) each bin
        values = edges[:-1] + np.diff(edges) * rng.uniform(1e-3, 1.0, size=scheme.n_bins)
        p = values[rng.integers(0, scheme.n_bins, size=n)]
    else:
        p = rng.uniform(0, 1, size=n)
        # sprinkle exact edge and endpoint values
        k = rng.integers(0, n + 1)
        p[:k] = np.where(rng.random(k) < 0.5, rng.choice([0.0, 1.0], size=k), p[:k])
    if base_rate is None:
        y = (rng.random(n) < p).astype(int)
    else:
        y = (rng.random(n) < base_rate).astype(int)
    return ForecastSeries(p, y)


def counts_from_sums(a, b, c, y_tot, n, scheme=None) -> CountSummary:
    scheme = scheme or BinningScheme.equal_width(len(a))
    z = np.zeros(len(a))
    return CountSummary(a, b, c, z, z, y_tot, n, scheme)


