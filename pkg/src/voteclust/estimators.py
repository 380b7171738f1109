"""scikit-learn style clustering wrappers around the solver and baselines.

Each estimator accepts either a SignedGraph or a precomputed signed affinity
matrix (square, symmetric, entries in [-1, +1], zero diagonal; positive
entries become positive links, negative entries negative links). `fit` sets
`labels_` aligned with the input's node order.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin

from .community import run_baseline
from .errors import DataError
from .graphs import SignedGraph
from .ils import IlsConfig, solve


def as_signed_graph(X) -> SignedGraph:
    """Accept a SignedGraph as-is or build one from a signed affinity matrix."""
    if isinstance(X, SignedGraph):
        return X
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise DataError(f"affinity matrix must be square, got shape {X.shape}")
    if not np.array_equal(X, X.T):
        raise DataError("affinity matrix must be symmetric")
    if X.size and np.abs(X).max() > 1.0:
        raise DataError("affinity entries must lie in [-1, +1]")
    if np.any(np.diag(X) != 0.0):
        raise DataError("affinity diagonal must be zero (no self-links)")
    n = X.shape[0]
    node_ids = [str(i) for i in range(n)]
    signed = {
        (node_ids[i], node_ids[j]): float(X[i, j])
        for i in range(n)
        for j in range(i + 1, n)
        if X[i, j] != 0.0
    }
    return SignedGraph.from_signed_weights(node_ids, signed)


def _labels_array(graph: SignedGraph, partition) -> np.ndarray:
    mapping = partition.as_mapping()
    return np.array([mapping[n] for n in graph.node_ids], dtype=int)


class IteratedLocalSearchClustering(ClusterMixin, BaseEstimator):
    """Minimum-imbalance partitioning of a signed graph.

    Attributes after fit: `labels_`, `n_clusters_`, `imbalance_` (total),
    `breakdown_`, `trace_`.
    """

    def __init__(
        self,
        neighbor_visit_probability: float = 0.7,
        perturbation_level: int = 15,
        max_iterations_without_improvement: int = 50,
        time_limit: float | None = None,
        worker_count: int = 1,
        random_state: int = 0,
    ):
        self.neighbor_visit_probability = neighbor_visit_probability
        self.perturbation_level = perturbation_level
        self.max_iterations_without_improvement = max_iterations_without_improvement
        self.time_limit = time_limit
        self.worker_count = worker_count
        self.random_state = random_state

    def fit(self, X, y=None):
        graph = as_signed_graph(X)
        cfg = IlsConfig(
            neighbor_visit_probability=self.neighbor_visit_probability,
            perturbation_level=self.perturbation_level,
            max_iterations_without_improvement=self.max_iterations_without_improvement,
            time_limit=self.time_limit,
            rng_seed=self.random_state,
            worker_count=self.worker_count,
        )
        partition, breakdown, trace = solve(graph, cfg)
        self.labels_ = _labels_array(graph, partition)
        self.n_clusters_ = partition.k
        self.imbalance_ = breakdown.total
        self.breakdown_ = breakdown
        self.trace_ = trace
        return self


class _BaselineClustering(ClusterMixin, BaseEstimator):
    """Shared fit logic for the unsigned-view baselines.

    Attributes after fit: `labels_`, `n_clusters_`, `modularity_`,
    `dendrogram_`, and `imbalance_` (evaluated on the signed input).
    """

    _algorithm = ""

    def __init__(self, view: str = "positive", filler_weight: float = 1.0):
        self.view = view
        self.filler_weight = filler_weight

    def fit(self, X, y=None):
        graph = as_signed_graph(X)
        report = run_baseline(graph, self._algorithm, self.view, self.filler_weight)
        self.labels_ = _labels_array(graph, report.partition)
        self.n_clusters_ = report.k
        self.modularity_ = report.modularity
        self.dendrogram_ = report.dendrogram
        self.imbalance_ = report.imbalance.total
        self.breakdown_ = report.imbalance
        return self


class FastGreedyClustering(_BaselineClustering):
    """Greedy modularity agglomeration on an unsigned view of the input."""

    _algorithm = "fastgreedy"


class EdgeBetweennessClustering(_BaselineClustering):
    """Divisive edge-betweenness clustering on an unsigned view of the input."""

    _algorithm = "edgebetweenness"
