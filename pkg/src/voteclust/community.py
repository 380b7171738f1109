"""Community detection baselines on unsigned graphs.

Both algorithms are hierarchical and deterministic: greedy modularity
agglomeration (merge the connected pair with the best modularity gain) and
divisive edge-betweenness removal. Each records a dendrogram and reports the
level of maximum modularity. Neither sees negative links; they are run on
the positive subgraph or the complementary negative graph of a signed graph
and judged afterwards by signed imbalance.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components, dijkstra

from .errors import DataError
from .graphs import (
    SignedGraph,
    UnsignedGraph,
    complementary_negative_graph,
    positive_subgraph,
)
from .partition import Partition, imbalance
from .report import RunReport

_TIE_TOL = 1e-9


@dataclass
class Dendrogram:
    """Merge or split hierarchy with per-level modularity.

    Level 0 is the starting partition (singletons for agglomeration, the
    connected components for division); level i follows event i-1. Events
    name each cluster by its lexicographically smallest node id.
    """

    node_ids: tuple
    events: list
    modularity_per_level: list
    level_labels: list

    @property
    def n_levels(self) -> int:
        return len(self.modularity_per_level)

    def partition_at(self, level: int) -> Partition:
        return Partition(self.node_ids, self.level_labels[level]).normalized()

    def best_level(self) -> int:
        """First level attaining the maximum modularity."""
        best = max(self.modularity_per_level)
        return self.modularity_per_level.index(best)


def _aligned_labels(g, p: Partition) -> np.ndarray:
    if p.node_ids == g.node_ids:
        return p.labels
    mapping = p.as_mapping()
    missing = [n for n in g.node_ids if n not in mapping]
    if missing:
        raise DataError(f"partition does not cover node {missing[0]!r}")
    return np.array([mapping[n] for n in g.node_ids], dtype=int)


def modularity(g: UnsignedGraph, p: Partition) -> float:
    """Weighted Newman modularity of `p` on `g`; 0 when the graph has no links."""
    total = g.total_weight
    if total == 0.0:
        return 0.0
    labels = _aligned_labels(g, p)
    k = int(labels.max()) + 1 if labels.size else 0
    intra = np.zeros(k)
    strength = np.zeros(g.n_nodes)
    for (i, j), w in g.edge_items():
        strength[i] += w
        strength[j] += w
        if labels[i] == labels[j]:
            intra[labels[i]] += w
    cluster_strength = np.bincount(labels, weights=strength, minlength=k)
    terms = intra / total - (cluster_strength / (2.0 * total)) ** 2
    return math.fsum(terms.tolist())


def fast_greedy(g: UnsignedGraph) -> tuple[Partition, Dendrogram]:
    """Agglomerative modularity maximization.

    Starts from singletons and repeatedly merges the connected cluster pair
    with the largest modularity gain (including negative gains once no
    positive one remains), so connected graphs produce a full |V|-level
    dendrogram. Disconnected components are never merged. Gain ties go to
    the lexicographically smallest representative pair. Returns the
    partition at the first maximum-modularity level.
    """
    n = g.n_nodes
    total = g.total_weight
    labels = np.arange(n)
    reps = list(g.node_ids)
    strength = [0.0] * n
    nbr: list[dict[int, float]] = [dict() for _ in range(n)]
    for (i, j), w in g.edge_items():
        strength[i] += w
        strength[j] += w
        nbr[i][j] = nbr[i].get(j, 0.0) + w
        nbr[j][i] = nbr[j].get(i, 0.0) + w

    q = modularity(g, Partition(g.node_ids, labels))
    events: list = []
    level_labels = [labels.copy()]
    mod_per_level = [q]
    alive = set(range(n))

    while True:
        best = None
        for a in sorted(alive):
            for b, w_ab in sorted(nbr[a].items()):
                if b <= a:
                    continue
                gain = w_ab / total - strength[a] * strength[b] / (2.0 * total * total)
                pair = (reps[a], reps[b]) if reps[a] < reps[b] else (reps[b], reps[a])
                if (
                    best is None
                    or gain > best[0] + _TIE_TOL
                    or (gain >= best[0] - _TIE_TOL and pair < best[1])
                ):
                    best = (gain, pair, a, b)
        if best is None:
            break
        gain, pair, a, b = best
        # merge b into a
        for c, w_bc in nbr[b].items():
            if c == a:
                continue
            nbr[c].pop(b)
            nbr[c][a] = nbr[c].get(a, 0.0) + w_bc
            nbr[a][c] = nbr[a].get(c, 0.0) + w_bc
        nbr[a].pop(b, None)
        nbr[b].clear()
        strength[a] += strength[b]
        reps[a] = min(reps[a], reps[b])
        alive.discard(b)
        labels = level_labels[-1].copy()
        labels[labels == b] = a
        q += gain
        events.append(pair)
        level_labels.append(labels)
        mod_per_level.append(q)

    dendro = Dendrogram(g.node_ids, events, mod_per_level, level_labels)
    return dendro.partition_at(dendro.best_level()), dendro


def _betweenness(n: int, e_u, e_v, weights, sources, max_block_floats: int = 8_000_000):
    """Weighted betweenness of every undirected edge, from the given sources.

    `e_u`/`e_v`/`weights` describe the undirected edges; link length for
    shortest paths is 1/weight. Scores only count dependencies of
    source-target pairs reachable from `sources`, so passing the nodes of one
    connected component yields that component's betweenness (undirected:
    full-graph scores need all nodes as sources, halved here as usual).

    Path counting and dependency accumulation run as fixpoint sweeps over all
    sources at once; shortest-path DAG membership uses a relative length
    tolerance, so ties between float-equal path lengths are honored.
    """
    half = e_u.size
    if half == 0:
        return np.zeros(0)
    src = np.concatenate([e_u, e_v])
    dst = np.concatenate([e_v, e_u])
    lengths = np.concatenate([1.0 / weights] * 2)
    e2 = 2 * half
    rev = np.concatenate([np.arange(half, e2), np.arange(half)])

    # Sort directed edges by head node once, so per-round accumulation is a
    # single reduceat instead of a sparse product.
    order = np.argsort(dst, kind="stable")
    inv_order = np.empty(e2, dtype=np.intp)
    inv_order[order] = np.arange(e2)
    src_s, dst_s, len_s = src[order], dst[order], lengths[order]
    rev_s = inv_order[rev[order]]
    heads, starts = np.unique(dst_s, return_index=True)

    adj = sp.csr_matrix((lengths, (src, dst)), shape=(n, n))
    dist_all = dijkstra(adj, directed=True, indices=sources)

    score = np.zeros(e2)
    block = max(1, min(sources.size, max_block_floats // max(1, e2)))
    for lo in range(0, sources.size, block):
        chunk = sources[lo:lo + block]
        rows = np.arange(chunk.size)
        d = dist_all[lo:lo + block]
        with np.errstate(invalid="ignore"):
            tight = np.abs(d[:, src_s] + len_s[None, :] - d[:, dst_s]) <= 1e-12 * (
                1.0 + np.abs(d[:, dst_s])
            )
        tight &= np.isfinite(d[:, dst_s])

        sigma = np.zeros((chunk.size, n))
        sigma[rows, chunk] = 1.0
        while True:
            grown = np.zeros((chunk.size, n))
            grown[:, heads] = np.add.reduceat(sigma[:, src_s] * tight, starts, axis=1)
            grown[rows, chunk] += 1.0
            if np.array_equal(grown, sigma):
                break
            sigma = grown

        ratio = np.divide(
            sigma[:, src_s], sigma[:, dst_s],
            out=np.zeros((chunk.size, e2)), where=tight,
        )
        # Dependency flows to an edge's tail; accumulating the reversed
        # directed edges by head is the same sum.
        delta = np.zeros((chunk.size, n))
        while True:
            contrib = ratio * (1.0 + delta[:, dst_s])
            contrib[~tight] = 0.0
            grown = np.zeros((chunk.size, n))
            grown[:, heads] = np.add.reduceat(contrib[:, rev_s], starts, axis=1)
            if np.array_equal(grown, delta):
                break
            delta = grown
        contrib = ratio * (1.0 + delta[:, dst_s])
        contrib[~tight] = 0.0
        score += contrib.sum(axis=0)

    directed = score[inv_order]
    return (directed[:half] + directed[half:]) / 2.0


def edge_betweenness_communities(g: UnsignedGraph) -> tuple[Partition, Dendrogram]:
    """Divisive clustering by repeated removal of the most central link.

    Link length for shortest paths is 1/weight, so strong agreement means a
    short distance. Removal ties go to the lexicographically smallest
    endpoint pair. Every split is a dendrogram level; modularity is always
    evaluated on the original graph. Returns the first maximum-modularity
    level.
    """
    n = g.n_nodes
    pairs = [(i, j) for (i, j), _ in g.edge_items()]
    weights = np.array([w for _, w in g.edge_items()], dtype=float)
    m = len(pairs)
    e_u = np.array([i for i, _ in pairs], dtype=np.intp)
    e_v = np.array([j for _, j in pairs], dtype=np.intp)
    active = np.ones(m, dtype=bool)

    def components() -> np.ndarray:
        data = np.ones(int(active.sum()))
        adj = sp.csr_matrix(
            (data, (e_u[active], e_v[active])), shape=(n, n)
        )
        _, comp = connected_components(adj, directed=False)
        return comp

    labels = components()
    events: list = []
    level_labels = [labels.copy()]
    mod_per_level = [modularity(g, Partition(g.node_ids, labels))]

    bet = np.zeros(m)
    idx = np.flatnonzero(active)
    bet[idx] = _betweenness(n, e_u[idx], e_v[idx], weights[idx], np.arange(n))

    while active.any():
        idx = np.flatnonzero(active)
        scores = bet[idx]
        top = scores.max()
        candidates = np.flatnonzero(scores >= top - _TIE_TOL * (1.0 + abs(top)))

        def endpoint_pair(local: int):
            a, b = g.node_ids[e_u[idx[local]]], g.node_ids[e_v[idx[local]]]
            return (a, b) if a < b else (b, a)

        chosen = idx[min(candidates.tolist(), key=endpoint_pair)]
        active[chosen] = False

        new_labels = components()
        if len(np.unique(new_labels)) > len(np.unique(labels)):
            part_a = min(
                g.node_ids[i]
                for i in np.flatnonzero(new_labels == new_labels[e_u[chosen]])
            )
            part_b = min(
                g.node_ids[i]
                for i in np.flatnonzero(new_labels == new_labels[e_v[chosen]])
            )
            events.append((part_a, part_b) if part_a < part_b else (part_b, part_a))
            level_labels.append(new_labels.copy())
            mod_per_level.append(modularity(g, Partition(g.node_ids, new_labels)))

        # Removal only changes scores inside its own (former) component; the
        # recomputation is restricted to those nodes and edges.
        touched = np.flatnonzero(labels == labels[e_u[chosen]])
        sub = np.flatnonzero(active & (labels[e_u] == labels[e_u[chosen]]))
        if sub.size:
            bet[sub] = _betweenness(n, e_u[sub], e_v[sub], weights[sub], touched)
        labels = new_labels

    dendro = Dendrogram(g.node_ids, events, mod_per_level, level_labels)
    return dendro.partition_at(dendro.best_level()), dendro


_ALGORITHMS = {
    "fastgreedy": fast_greedy,
    "edgebetweenness": edge_betweenness_communities,
}

_VIEWS = ("positive", "compneg")


def run_baseline(
    g_signed: SignedGraph,
    algorithm: str,
    view: str,
    filler_weight: float = 1.0,
) -> RunReport:
    """Run a baseline on an unsigned view of `g_signed`.

    `view` is "positive" (keep positive links) or "compneg" (all pairs minus
    the negative links, absent pairs weighted `filler_weight`). Modularity is
    reported on the view; imbalance on the original signed graph.
    """
    if algorithm not in _ALGORITHMS:
        raise DataError(
            f"unknown algorithm {algorithm!r}; expected one of {sorted(_ALGORITHMS)}"
        )
    if view == "positive":
        unsigned = positive_subgraph(g_signed)
    elif view == "compneg":
        unsigned = complementary_negative_graph(g_signed, filler_weight)
    else:
        raise DataError(f"unknown view {view!r}; expected one of {list(_VIEWS)}")

    started = time.monotonic()
    partition, dendro = _ALGORITHMS[algorithm](unsigned)
    wall_ms = (time.monotonic() - started) * 1000.0

    report = RunReport(
        algorithm=algorithm,
        view=view,
        partition=partition,
        imbalance=imbalance(g_signed, partition),
        k=partition.k,
        modularity=dendro.modularity_per_level[dendro.best_level()],
        wall_ms=wall_ms,
        config={"filler_weight": filler_weight} if view == "compneg" else {},
    )
    report.dendrogram = dendro
    return report


def write_dendrogram_csv(dendro: Dendrogram, path) -> None:
    """Write `step,cluster_a,cluster_b,modularity`; step 0 is the starting
    level and has no event columns."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["step", "cluster_a", "cluster_b", "modularity"])
        writer.writerow([0, "", "", repr(dendro.modularity_per_level[0])])
        for step, ((a, b), q) in enumerate(
            zip(dendro.events, dendro.modularity_per_level[1:]), start=1
        ):
            writer.writerow([step, a, b, repr(q)])
