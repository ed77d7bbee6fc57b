"""Serializable result document for a decomposed forecast archive."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Optional

from .core import BinningScheme, ForecastSeries, empirical_brier, summarize
from .decomp import decompose_all
from .variance import variance_estimates

SCHEMA_VERSION = "1.0"


@dataclass
class ResultDocument:
    n: int
    edges: list
    counts: dict
    brier: float
    brier_se: Optional[float]
    decompositions: dict
    variances: dict
    gamma: Optional[float]
    diagnostics: dict = field(default_factory=dict)
    schema_version: str = SCHEMA_VERSION

    @property
    def n_bins(self) -> int:
        return len(self.edges) - 1

    def to_dict(self) -> dict:
        d = asdict(self)
        return {
            "schema_version": d.pop("schema_version"),
            "input": {"n": d.pop("n"), "bins": self.n_bins, "edges": d.pop("edges")},
            **d,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ResultDocument":
        d = dict(d)
        inp = d.pop("input")
        return cls(n=inp["n"], edges=list(inp["edges"]), **d)

    def to_json(self) -> str:
        # float repr is the shortest string that parses back to the same double
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ResultDocument":
        return cls.from_dict(json.loads(text))


def decompose_series(series: ForecastSeries, scheme: BinningScheme, skipped_rows: int = 0) -> ResultDocument:
    counts = summarize(series, scheme)
    brier, se = empirical_brier(series)
    families = decompose_all(counts)
    var = variance_estimates(counts)
    cc = families.get("consistency_corrected")
    return ResultDocument(
        n=counts.n,
        edges=list(scheme.edges),
        counts={"a": counts.a.tolist(), "b": counts.b.tolist(), "c": counts.c.tolist()},
        brier=brier,
        brier_se=se,
        decompositions={
            name: {"rel": d.rel, "res": d.res, "unc": d.unc} for name, d in families.items()
        },
        variances=var.as_dict(),
        gamma=None if cc is None else cc.gamma,
        diagnostics={"clamped_variances": list(var.clamped), "skipped_rows": skipped_rows},
    )


def flatten(d: dict, prefix: str = "") -> list[tuple[str, object]]:
    """Nested mapping to ``(dotted.key, value)`` pairs; lists are indexed."""
    out = []
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.extend(flatten(v, key + "."))
        elif isinstance(v, list):
            for i, item in enumerate(v):
                if isinstance(item, dict):
                    out.extend(flatten(item, f"{key}.{i}."))
                else:
                    out.append((f"{key}.{i}", item))
        else:
            out.append((key, v))
    return out
