"""Partitions of a signed graph and the imbalance objective.

Imbalance counts what a partition gets wrong: negative weight kept inside
clusters plus positive weight cut between clusters. Sums use compensated
summation so the total does not depend on link order.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError
from .graphs import SignedGraph

NEW_CLUSTER = -1
"""Sentinel target for move_delta: move the node into a fresh singleton."""


class Partition:
    """Assignment of every node to exactly one cluster.

    Labels are non-negative integers; their values carry no meaning beyond
    equality. `normalized()` relabels clusters 0..k-1 in order of first
    appearance so that equal clusterings compare equal.
    """

    def __init__(self, node_ids, labels):
        self.node_ids = tuple(str(n) for n in node_ids)
        if len(set(self.node_ids)) != len(self.node_ids):
            raise DataError("duplicate node ids in partition")
        labels = np.asarray(labels, dtype=int)
        if labels.shape != (len(self.node_ids),):
            raise DataError(
                f"partition needs one label per node: {len(self.node_ids)} nodes, "
                f"{labels.size} labels"
            )
        if labels.size and labels.min() < 0:
            raise DataError("cluster labels must be non-negative")
        self.labels = labels
        self.labels.flags.writeable = False
        self._index = {n: i for i, n in enumerate(self.node_ids)}

    @classmethod
    def from_mapping(cls, mapping: dict) -> "Partition":
        node_ids = list(mapping)
        return cls(node_ids, [mapping[n] for n in node_ids])

    def as_mapping(self) -> dict[str, int]:
        return {n: int(c) for n, c in zip(self.node_ids, self.labels)}

    @property
    def n_nodes(self) -> int:
        return len(self.node_ids)

    @property
    def k(self) -> int:
        """Number of distinct clusters."""
        return len(set(self.labels.tolist()))

    def label_of(self, node) -> int:
        try:
            return int(self.labels[self._index[str(node)]])
        except KeyError:
            raise DataError(f"unknown node id {node!r}") from None

    def clusters(self) -> dict[int, list[str]]:
        out: dict[int, list[str]] = {}
        for node, label in zip(self.node_ids, self.labels):
            out.setdefault(int(label), []).append(node)
        return out

    def normalized(self) -> "Partition":
        """Relabel clusters by first appearance: node order decides 0, 1, ..."""
        remap: dict[int, int] = {}
        new_labels = np.empty_like(self.labels)
        for i, label in enumerate(self.labels.tolist()):
            if label not in remap:
                remap[label] = len(remap)
            new_labels[i] = remap[label]
        return Partition(self.node_ids, new_labels)

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        if self.node_ids != other.node_ids:
            return False
        return np.array_equal(
            self.normalized().labels, other.normalized().labels
        )

    def __hash__(self):
        return hash((self.node_ids, self.normalized().labels.tobytes()))

    def __repr__(self):
        return f"Partition({self.n_nodes} nodes, {self.k} clusters)"


@dataclass(frozen=True)
class ImbalanceBreakdown:
    """Imbalance split into its two failure modes.

    `percent_of_total_weight` is the total imbalance as a percentage of the
    graph's total link weight (0 when the graph has no links), which makes
    solutions comparable across graphs of different density.
    """

    uncut_negative_weight: float
    cut_positive_weight: float
    total: float
    percent_of_total_weight: float


def _labels_for_graph(g: SignedGraph, p: Partition) -> np.ndarray:
    if p.node_ids != g.node_ids:
        mapping = p.as_mapping()
        missing = [n for n in g.node_ids if n not in mapping]
        if missing:
            raise DataError(f"partition does not cover node {missing[0]!r}")
        return np.array([mapping[n] for n in g.node_ids], dtype=int)
    return p.labels


def imbalance(g: SignedGraph, p: Partition) -> ImbalanceBreakdown:
    """Imbalance of partition `p` on signed graph `g`.

    Negative links inside a cluster and positive links across clusters count
    toward the total with their weights; everything else is free.
    """
    labels = _labels_for_graph(g, p)
    uncut_negative = []
    cut_positive = []
    for (i, j), w in g.signed_edge_items():
        same = labels[i] == labels[j]
        if w < 0 and same:
            uncut_negative.append(-w)
        elif w > 0 and not same:
            cut_positive.append(w)
    neg = math.fsum(uncut_negative)
    pos = math.fsum(cut_positive)
    total = neg + pos
    grand = math.fsum(abs(w) for _, w in g.signed_edge_items())
    percent = 100.0 * total / grand if grand > 0 else 0.0
    return ImbalanceBreakdown(neg, pos, total, percent)


def move_delta(g: SignedGraph, p: Partition, node, target: int) -> float:
    """Change in imbalance if `node` moves to cluster `target`.

    `target` may be NEW_CLUSTER (-1) for a fresh singleton. Exact for the
    links incident to the node; negative means the move improves.
    """
    labels = _labels_for_graph(g, p)
    try:
        idx = g._index[str(node)]
    except KeyError:
        raise DataError(f"unknown node id {node!r}") from None
    current = int(labels[idx])
    if target == current:
        raise DataError(f"node {node!r} is already in cluster {target}")
    if target != NEW_CLUSTER and target < 0:
        raise DataError(f"invalid target cluster {target}")

    nbrs, wts = g.adjacency()
    delta = 0.0
    for j, w in zip(nbrs[idx].tolist(), wts[idx].tolist()):
        lab = int(labels[j])
        if w > 0:
            # positive link: pays when cut
            before = 0.0 if lab == current else w
            after = 0.0 if lab == target else w
        else:
            # negative link: pays when kept together
            before = -w if lab == current else 0.0
            after = -w if lab == target else 0.0
        delta += after - before
    return delta


def brute_force_optimum(g: SignedGraph, max_nodes: int = 12) -> tuple[Partition, ImbalanceBreakdown]:
    """Exact minimum-imbalance partition by exhaustive enumeration.

    Walks every set partition via restricted growth strings, so it is only
    viable for small graphs (Bell(12) is ~4.2 million). Ties break toward
    fewer clusters, then lexicographically smaller label sequence.
    """
    n = g.n_nodes
    if n == 0:
        raise DataError("cannot enumerate partitions of an empty graph")
    if n > max_nodes:
        raise DataError(
            f"graph has {n} nodes; brute force is capped at {max_nodes}"
        )

    edges = [((i, j), w) for (i, j), w in g.signed_edge_items()]
    grand = math.fsum(abs(w) for _, w in edges)

    best_labels = None
    best_key = None

    labels = [0] * n

    def walk(pos: int, max_used: int):
        nonlocal best_labels, best_key
        if pos == n:
            total = math.fsum(
                -w if w < 0 else w
                for (i, j), w in edges
                if (w < 0) == (labels[i] == labels[j])
            )
            key = (total, max_used + 1, tuple(labels))
            if best_key is None or key < best_key:
                best_key = key
                best_labels = labels.copy()
            return
        for c in range(max_used + 2):
            labels[pos] = c
            walk(pos + 1, max(max_used, c))
        labels[pos] = 0

    walk(1, 0)

    partition = Partition(g.node_ids, best_labels)
    return partition, imbalance(g, partition)


def write_partition_csv(p: Partition, path) -> None:
    """Write `node_id,cluster` rows, one per node, in node order."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["node_id", "cluster"])
        for node, label in zip(p.node_ids, p.labels):
            writer.writerow([node, int(label)])


def read_partition_csv(path) -> Partition:
    path = Path(path)
    node_ids = []
    labels = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != ["node_id", "cluster"]:
            raise DataError(f"{path}:1: expected header 'node_id,cluster'")
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise DataError(f"{path}:{line_no}: expected 2 columns, got {len(row)}")
            node_ids.append(row[0].strip())
            try:
                labels.append(int(row[1]))
            except ValueError:
                raise DataError(f"{path}:{line_no}: invalid cluster label {row[1]!r}") from None
    return Partition(node_ids, labels)
