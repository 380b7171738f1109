"""Uniform result record shared by the solver and the baselines."""

from __future__ import annotations

from dataclasses import dataclass, field

from .partition import ImbalanceBreakdown, Partition


@dataclass
class RunReport:
    """One algorithm run on one graph slice.

    `modularity` is filled by the baselines (on the unsigned view they ran
    on) and left None for the signed-graph solver; `imbalance` is always
    evaluated on the original signed graph so runs are comparable.
    """

    algorithm: str
    view: str | None
    partition: Partition
    imbalance: ImbalanceBreakdown
    k: int
    modularity: float | None
    wall_ms: float
    config: dict = field(default_factory=dict)
    slice_label: str = ""

    def summary(self) -> dict:
        """JSON-friendly row for the cross-slice report."""
        out = {
            "algorithm": self.algorithm,
            "view": self.view,
            "imbalance_total": self.imbalance.total,
            "imbalance_percent": self.imbalance.percent_of_total_weight,
            "k": self.k,
            "wall_ms": self.wall_ms,
        }
        if self.modularity is not None:
            out["modularity"] = self.modularity
        if self.slice_label:
            out["slice"] = self.slice_label
        return out
