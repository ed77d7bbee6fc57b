"""Sampling variances of the decomposition estimators by propagation of uncertainty.

All six estimators are functions of one stacked vector of column sums
``x = [A_1..A_D | B_1..B_D | C_1..C_D | Y]``. Its covariance is estimated from
the per-bin sufficient statistics, and each variance is the quadratic form
``J @ cov @ J`` with the estimator's gradient ``J``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import CountSummary

ESTIMATORS = ("rel", "res", "unc", "rel_bc", "res_bc", "unc_bc")
TRADITIONAL_ESTIMATORS = ESTIMATORS[:3]


def stacked_sums(counts: CountSummary) -> np.ndarray:
    return np.concatenate([counts.a, counts.b, counts.c, [float(counts.y_tot)]])


def gram_matrix(counts: CountSummary) -> np.ndarray:
    """``X.T @ X`` of the per-forecast indicator matrix, from sufficient statistics.

    A row of X has exactly one bin active, so products between different bins
    vanish and only the per-bin 3x3 blocks and the Y row/column are non-zero.
    """
    D = counts.n_bins
    A, B, C, Y = np.arange(D), np.arange(D, 2 * D), np.arange(2 * D, 3 * D), 3 * D
    g = np.zeros((3 * D + 1, 3 * D + 1))
    g[A, A] = counts.a
    g[B, B] = counts.b
    g[C, C] = counts.s2
    g[A, B] = g[B, A] = counts.b
    g[A, C] = g[C, A] = counts.c
    g[B, C] = g[C, B] = counts.spy
    g[A, Y] = g[Y, A] = counts.b
    g[B, Y] = g[Y, B] = counts.b
    g[C, Y] = g[Y, C] = counts.spy
    g[Y, Y] = counts.y_tot
    return g


def covariance_of_sums(counts: CountSummary) -> np.ndarray:
    """Estimated covariance matrix of the stacked column sums,
    ``X.T (I - 11^T / N) X``, assuming independent identically distributed rows."""
    x = stacked_sums(counts)
    cov = gram_matrix(counts) - np.outer(x, x) / counts.n
    cov = 0.5 * (cov + cov.T)
    cov.setflags(write=False)
    return cov


def _safe_div(num, den, mask):
    out = np.zeros(np.broadcast(num, den).shape)
    np.divide(num, den, out=out, where=mask)
    return out


def gradients(a, b, c, y_tot, n) -> dict:
    """Analytic gradients of the six estimators with respect to the stacked sums.

    Entries whose closed form has a vanishing denominator (empty bins, and bins
    with a single forecast in the bias-corrected REL/RES terms) are zero.
    """
    a, b, c = (np.asarray(v, dtype=float) for v in (a, b, c))
    D = a.size
    m0 = a > 0
    m1 = a > 1
    a1 = np.where(m1, a - 1.0, 1.0)
    clim = y_tot / n
    freq = _safe_div(b, a, m0)
    err = b - c

    def row(d_a=0.0, d_b=0.0, d_c=0.0, d_y=0.0):
        j = np.zeros(3 * D + 1)
        j[:D], j[D:2 * D], j[2 * D:3 * D], j[3 * D] = d_a, d_b, d_c, d_y
        return j

    rel_a = np.where(m0, -_safe_div(err**2, n * a**2, m0), 0.0)
    rel_b = np.where(m0, _safe_div(2.0 * err, n * a, m0), 0.0)
    res_a = np.where(m0, -(freq - clim) * (freq + clim) / n, 0.0)
    res_b = np.where(m0, 2.0 * (freq - clim) / n, 0.0)

    out = {
        "rel": row(rel_a, rel_b, -rel_b),
        # the Y derivative of RES vanishes identically because sum(B) == Y and sum(A) == N
        "res": row(res_a, res_b),
        "unc": row(d_y=1.0 / n - 2.0 * y_tot / n**2),
    }
    if n < 2:
        return out

    relp_a = np.where(
        m1,
        -_safe_div(err**2 + b**2 / a1 - a * b * (a - b) / a1**2, n * a**2, m1),
        0.0,
    )
    relp_b = np.where(m1, (2.0 * b - 1.0) / (n * a1) - _safe_div(2.0 * c, n * a, m1), 0.0)
    resp_a = np.where(
        m1,
        res_a + _safe_div(b * ((a - b) ** 2 - b * (b - 1.0)), n * a**2 * a1**2, m1),
        0.0,
    )
    resp_b = np.where(m1, res_b - _safe_div(a - 2.0 * b, n * a * a1, m1), 0.0)
    out["rel_bc"] = row(relp_a, relp_b, -rel_b)
    out["res_bc"] = row(resp_a, resp_b, d_y=(n - 2.0 * y_tot) / (n**2 * (n - 1)))
    out["unc_bc"] = row(d_y=(n - 2.0 * y_tot) / (n * (n - 1)))
    return out


def jacobians(counts: CountSummary) -> dict:
    """Gradient rows of length ``3D + 1`` keyed by estimator name."""
    return gradients(counts.a, counts.b, counts.c, counts.y_tot, counts.n)


@dataclass(frozen=True)
class VarianceSet:
    rel: float
    res: float
    unc: float
    rel_bc: Optional[float] = None
    res_bc: Optional[float] = None
    unc_bc: Optional[float] = None
    # estimators whose quadratic form came out negative through round-off
    clamped: tuple = field(default=())

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in ESTIMATORS}

    def sd(self, name: str) -> float:
        return float(np.sqrt(getattr(self, name)))


def variance_estimates(counts: CountSummary) -> VarianceSet:
    """First-order variance of every estimator; the bias-corrected three are
    ``None`` when fewer than two forecasts are available."""
    cov = covariance_of_sums(counts)
    values = {}
    clamped = []
    for name, j in jacobians(counts).items():
        v = float(j @ cov @ j)
        if v < 0.0:
            clamped.append(name)
            v = 0.0
        values[name] = v
    return VarianceSet(**values, clamped=tuple(clamped))
