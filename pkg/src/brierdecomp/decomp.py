"""Reliability / resolution / uncertainty estimators of the Brier score."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import CountSummary, UndefinedCorrectionError

TRADITIONAL = "traditional"
BIAS_CORRECTED = "bias_corrected"
CONSISTENCY_CORRECTED = "consistency_corrected"

# upper bounds of the allowed (rel, res, unc) box; lower bounds are all 0
REL_MAX, RES_MAX, UNC_MAX = 1.0, 1.0, 0.25


@dataclass(frozen=True)
class Decomposition:
    rel: float
    res: float
    unc: float
    family: str
    gamma: Optional[float] = None

    @property
    def brier_sum(self) -> float:
        """``rel - res + unc``."""
        return self.rel - self.res + self.unc

    def as_dict(self) -> dict:
        out = {"rel": self.rel, "res": self.res, "unc": self.unc}
        if self.gamma is not None:
            out["gamma"] = self.gamma
        return out


# The estimators below are written as smooth functions of the column sums
# (a, b, c, y_tot) with n held fixed, so they can be differentiated
# numerically. Bin membership of D0 / D1 is decided from ``a`` only.

def rel_of(a, b, c, n):
    a, b, c = (np.asarray(v, dtype=float) for v in (a, b, c))
    m = a > 0
    return float(np.sum((b[m] - c[m]) ** 2 / a[m]) / n)


def res_of(a, b, y_tot, n):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    m = a > 0
    return float(np.sum(a[m] * (b[m] / a[m] - y_tot / n) ** 2) / n)


def unc_of(y_tot, n):
    return y_tot * (n - y_tot) / n**2


def reliability_shift(a, b, n):
    """Bias correction subtracted from REL (bins holding at least two forecasts)."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    m = a > 1
    return float(np.sum(b[m] * (a[m] - b[m]) / (a[m] * (a[m] - 1.0))) / n)


def uncertainty_shift(y_tot, n):
    """Bias correction added to UNC."""
    return y_tot * (n - y_tot) / (n**2 * (n - 1))


def component_estimates(a, b, c, y_tot, n) -> dict:
    """All six estimators evaluated at (possibly real-valued) column sums."""
    rel = rel_of(a, b, c, n)
    res = res_of(a, b, y_tot, n)
    unc = unc_of(y_tot, n)
    out = {"rel": rel, "res": res, "unc": unc}
    if n >= 2:
        s = reliability_shift(a, b, n)
        t = uncertainty_shift(y_tot, n)
        out.update(rel_bc=rel - s, res_bc=res - s + t, unc_bc=y_tot * (n - y_tot) / (n * (n - 1)))
    return out


def decompose_traditional(counts: CountSummary) -> Decomposition:
    return Decomposition(
        rel=rel_of(counts.a, counts.b, counts.c, counts.n),
        res=res_of(counts.a, counts.b, counts.y_tot, counts.n),
        unc=unc_of(counts.y_tot, counts.n),
        family=TRADITIONAL,
    )


def _require_two(counts: CountSummary):
    if counts.n < 2:
        raise UndefinedCorrectionError(
            f"bias-corrected estimators need at least 2 forecasts, got {counts.n}"
        )


def decompose_bias_corrected(counts: CountSummary) -> Decomposition:
    """Bias-corrected components; these may fall outside their analytic ranges."""
    _require_two(counts)
    d = decompose_traditional(counts)
    s = reliability_shift(counts.a, counts.b, counts.n)
    t = uncertainty_shift(counts.y_tot, counts.n)
    n, y = counts.n, counts.y_tot
    return Decomposition(
        rel=d.rel - s,
        res=d.res - s + t,
        unc=y * (n - y) / (n * (n - 1)),
        family=BIAS_CORRECTED,
    )


def shrink_factor(rel: float, res: float, unc: float, s: float, t: float) -> float:
    """Largest step in [0, 1] along the bias-correction direction that stays in range.

    A constraint whose denominator is zero cannot be violated and is skipped.
    """
    candidates = [1.0]
    if s != 0.0:
        candidates.append(rel / s)
    if s - t != 0.0:
        candidates.append(max(res / (s - t), (res - 1.0) / (s - t)))
    if t != 0.0:
        candidates.append((1.0 - 4.0 * unc) / (4.0 * t))
    return max(0.0, min(candidates))


def consistency_correct(counts: CountSummary) -> Decomposition:
    """Move from the traditional towards the bias-corrected triple as far as the
    allowed box ``[0,1] x [0,1] x [0,0.25]`` permits, at constant Brier sum."""
    _require_two(counts)
    d = decompose_traditional(counts)
    s = reliability_shift(counts.a, counts.b, counts.n)
    t = uncertainty_shift(counts.y_tot, counts.n)
    full = decompose_bias_corrected(counts)
    if 0.0 <= full.rel <= REL_MAX and 0.0 <= full.res <= RES_MAX and 0.0 <= full.unc <= UNC_MAX:
        return Decomposition(full.rel, full.res, full.unc, family=CONSISTENCY_CORRECTED, gamma=1.0)
    gamma = shrink_factor(d.rel, d.res, d.unc, s, t)
    rel = d.rel - gamma * s
    res = d.res - gamma * (s - t)
    unc = d.unc + gamma * t
    # absorb round-off of the order of one ulp at a binding constraint
    rel = min(max(rel, 0.0), REL_MAX)
    res = min(max(res, 0.0), RES_MAX)
    unc = min(max(unc, 0.0), UNC_MAX)
    return Decomposition(rel=rel, res=res, unc=unc, family=CONSISTENCY_CORRECTED, gamma=gamma)


def decompose_all(counts: CountSummary) -> dict:
    """Every decomposition family available for `counts`, keyed by family name."""
    out = {TRADITIONAL: decompose_traditional(counts)}
    if counts.n >= 2:
        out[BIAS_CORRECTED] = decompose_bias_corrected(counts)
        out[CONSISTENCY_CORRECTED] = consistency_correct(counts)
    return out
