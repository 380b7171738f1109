"""Iterated local search for minimum-imbalance partitioning.

The solver runs one or more chains of greedy construction, stochastic local
search over single-node relocations, and perturbation of the best-known
solution. Chains share a best-solution cell: every improvement is published,
and each chain re-reads the shared best before perturbing.

Totals that drive accept/publish decisions are recomputed with compensated
summation, so the trace and the returned breakdown are exact and a run is
reproducible bit-for-bit with one worker and a fixed seed.
"""

from __future__ import annotations

import math
import threading
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .graphs import SignedGraph
from .partition import ImbalanceBreakdown, Partition, imbalance

EPS = 1e-12
"""Improvement threshold: a move or candidate must beat this margin."""


@dataclass
class IlsConfig:
    """Solver knobs.

    neighbor_visit_probability gates each candidate move independently, so on
    average only that fraction of the relocation neighborhood is examined per
    node. perturbation_level is the number of nodes randomly reassigned when
    escaping a local optimum.
    """

    neighbor_visit_probability: float = 0.7
    perturbation_level: int = 15
    max_iterations_without_improvement: int = 50
    time_limit: float | None = None
    rng_seed: int = 0
    worker_count: int = 1

    def __post_init__(self):
        if not (0.0 < self.neighbor_visit_probability <= 1.0):
            raise DataError(
                f"neighbor_visit_probability must be in (0, 1], got {self.neighbor_visit_probability}"
            )
        if self.perturbation_level < 1:
            raise DataError("perturbation_level must be a positive integer")
        if self.max_iterations_without_improvement < 1:
            raise DataError("max_iterations_without_improvement must be a positive integer")
        if self.time_limit is not None and self.time_limit <= 0:
            raise DataError("time_limit must be positive when set")
        if self.worker_count < 1:
            raise DataError("worker_count must be a positive integer")


@dataclass
class SolveTrace:
    """Progress record: one best-so-far entry per iteration event.

    An entry is appended after each chain's initial construction, after every
    perturbation cycle, and after the final polish, so the sequence is
    non-increasing and ends at the returned total. `restarts` counts the
    perturbation cycles across all chains.
    """

    best_imbalance_per_iteration: list[float] = field(default_factory=list)
    iterations_run: int = 0
    wall_time: float = 0.0
    restarts: int = 0


def _edge_arrays(g: SignedGraph):
    items = list(g.signed_edge_items())
    if items:
        e_i = np.array([i for (i, _), _ in items], dtype=np.intp)
        e_j = np.array([j for (_, j), _ in items], dtype=np.intp)
        e_w = np.array([w for _, w in items], dtype=float)
    else:
        e_i = np.empty(0, dtype=np.intp)
        e_j = np.empty(0, dtype=np.intp)
        e_w = np.empty(0, dtype=float)
    return e_i, e_j, e_w


def _exact_total(labels: np.ndarray, e_i, e_j, e_w) -> float:
    """Imbalance total by compensated summation over the violated links."""
    same = labels[e_i] == labels[e_j]
    violated = np.where(e_w < 0, same, ~same)
    return math.fsum(np.abs(e_w[violated]).tolist())


def _compact(labels: np.ndarray) -> tuple[np.ndarray, int]:
    """Relabel to 0..k-1 in first-appearance order; returns (labels, k)."""
    remap: dict[int, int] = {}
    out = np.empty_like(labels)
    for i, lab in enumerate(labels.tolist()):
        if lab not in remap:
            remap[lab] = len(remap)
        out[i] = remap[lab]
    return out, len(remap)


def _move_costs(u: int, labels, k: int, nbr_idx, nbr_w) -> np.ndarray:
    """Objective share of node u's incident links for each possible home.

    Entry c (c < k) is u's cost when placed in cluster c; entry k is the cost
    of a fresh singleton. Differences of entries are exactly move deltas.
    """
    nbrs = nbr_idx[u]
    wts = nbr_w[u]
    costs = np.empty(k + 1, dtype=float)
    if nbrs.size == 0:
        costs.fill(0.0)
        return costs
    lab = labels[nbrs]
    pos = np.where(wts > 0, wts, 0.0)
    neg = np.where(wts < 0, -wts, 0.0)
    adj_pos = np.bincount(lab, weights=pos, minlength=k)
    adj_neg = np.bincount(lab, weights=neg, minlength=k)
    p_total = pos.sum()
    costs[:k] = adj_neg + (p_total - adj_pos)
    costs[k] = p_total
    return costs


def _local_search_inplace(labels, k: int, nbr_idx, nbr_w, prob: float, rng) -> int:
    """Best-improvement relocation passes until a full pass applies no move.

    Candidates are every other non-empty cluster plus a fresh one; each is
    examined with probability `prob` (an independent draw per candidate).
    Ties go to the lowest target index, the fresh cluster ranking last.
    Cluster indices stay compact: an emptied slot is backfilled by the
    highest-index cluster. Returns the final k.
    """
    n = labels.shape[0]
    sizes = np.bincount(labels, minlength=k).tolist()
    while True:
        moved = False
        for u in rng.permutation(n).tolist():
            cur = int(labels[u])
            costs = _move_costs(u, labels, k, nbr_idx, nbr_w)
            deltas = costs - costs[cur]
            eligible = rng.random(k + 1) < prob
            eligible[cur] = False
            deltas[~eligible] = np.inf
            best = int(deltas.argmin())
            if deltas[best] >= -EPS:
                continue
            moved = True
            sizes[cur] -= 1
            if best == k:
                labels[u] = k
                sizes.append(1)
                k += 1
            else:
                labels[u] = best
                sizes[best] += 1
            if sizes[cur] == 0:
                last = k - 1
                if cur != last:
                    labels[labels == last] = cur
                    sizes[cur] = sizes[last]
                sizes.pop()
                k -= 1
        if not moved:
            return k


def _perturb_inplace(labels, k: int, level: int, rng) -> int:
    """Reassign min(level, n) distinct nodes uniformly over the current
    clusters plus one shared fresh cluster; compacts labels afterwards."""
    n = labels.shape[0]
    picked = rng.choice(n, size=min(level, n), replace=False)
    labels[picked] = rng.integers(0, k + 1, size=picked.size)
    compacted, k = _compact(labels)
    labels[:] = compacted
    return k


def _greedy_labels(n: int, nbr_idx, nbr_w, rng) -> np.ndarray:
    """Seeded-order greedy: join the cheapest existing cluster only when that
    beats opening a singleton."""
    labels = np.full(n, -1, dtype=int)
    k = 0
    for u in rng.permutation(n).tolist():
        nbrs = nbr_idx[u]
        wts = nbr_w[u]
        assigned = labels[nbrs] >= 0
        lab = labels[nbrs][assigned]
        pos = np.where(wts > 0, wts, 0.0)[assigned]
        neg = np.where(wts < 0, -wts, 0.0)[assigned]
        p_total = pos.sum()
        if k and lab.size:
            adj_pos = np.bincount(lab, weights=pos, minlength=k)
            adj_neg = np.bincount(lab, weights=neg, minlength=k)
            costs = adj_neg + (p_total - adj_pos)
            best = int(costs.argmin())
            if costs[best] < p_total - EPS:
                labels[u] = best
                continue
        labels[u] = k
        k += 1
    return labels


def greedy_construct(g: SignedGraph, rng_seed: int = 0) -> Partition:
    """Greedy initial partition over a seeded random node order."""
    if g.n_nodes == 0:
        raise DataError("cannot construct a partition of an empty graph")
    nbr_idx, nbr_w = g.adjacency()
    rng = np.random.default_rng(rng_seed)
    labels, _ = _compact(_greedy_labels(g.n_nodes, nbr_idx, nbr_w, rng))
    return Partition(g.node_ids, labels)


def local_search(g: SignedGraph, p: Partition, cfg: IlsConfig, rng=None) -> Partition:
    """Run relocation passes on `p` until no evaluated move improves."""
    if rng is None:
        rng = np.random.default_rng(cfg.rng_seed)
    if p.node_ids != g.node_ids:
        mapping = p.as_mapping()
        try:
            raw = np.array([mapping[nid] for nid in g.node_ids], dtype=int)
        except KeyError as exc:
            raise DataError(f"partition does not cover node {exc.args[0]!r}") from None
    else:
        raw = p.labels.copy()
    labels, k = _compact(raw)
    nbr_idx, nbr_w = g.adjacency()
    _local_search_inplace(labels, k, nbr_idx, nbr_w, cfg.neighbor_visit_probability, rng)
    return Partition(g.node_ids, labels).normalized()


def perturb(p: Partition, level: int, rng) -> Partition:
    """Randomly reassign up to `level` distinct nodes; result normalized."""
    if level < 1:
        raise DataError("perturbation level must be a positive integer")
    labels, k = _compact(p.labels.copy())
    _perturb_inplace(labels, k, level, rng)
    return Partition(p.node_ids, labels)


class _SharedBest:
    """Best-known solution cell shared by the chains; also owns the trace."""

    def __init__(self):
        self.lock = threading.Lock()
        self.total = math.inf
        self.labels = None
        self.trace: list[float] = []
        self.restarts = 0

    def offer(self, total: float, labels: np.ndarray) -> bool:
        """Publish if strictly better; always records a trace entry."""
        with self.lock:
            improved = total < self.total - EPS
            if improved:
                self.total = total
                self.labels = labels.copy()
            self.trace.append(self.total)
            return improved

    def snapshot(self):
        with self.lock:
            return self.total, None if self.labels is None else self.labels.copy()


def _run_chain(shared: _SharedBest, n, nbr_idx, nbr_w, edge_arrays, cfg: IlsConfig,
               rng, deadline: float | None) -> None:
    e_i, e_j, e_w = edge_arrays
    prob = cfg.neighbor_visit_probability

    labels = _greedy_labels(n, nbr_idx, nbr_w, rng)
    labels, k = _compact(labels)
    k = _local_search_inplace(labels, k, nbr_idx, nbr_w, prob, rng)
    best_total = _exact_total(labels, e_i, e_j, e_w)
    shared.offer(best_total, labels)

    stalled = 0
    while stalled < cfg.max_iterations_without_improvement:
        if deadline is not None and time.monotonic() >= deadline:
            break
        shared_total, shared_labels = shared.snapshot()
        if shared_total < best_total - EPS:
            best_total = shared_total
            labels = shared_labels
            stalled = 0

        cand = labels.copy()
        cand, ck = _compact(cand)
        ck = _perturb_inplace(cand, ck, cfg.perturbation_level, rng)
        ck = _local_search_inplace(cand, ck, nbr_idx, nbr_w, prob, rng)
        cand_total = _exact_total(cand, e_i, e_j, e_w)
        with shared.lock:
            shared.restarts += 1
        if cand_total < best_total - EPS:
            best_total = cand_total
            labels = cand
            stalled = 0
        else:
            stalled += 1
        shared.offer(best_total, labels)


def solve(g: SignedGraph, cfg: IlsConfig | None = None) -> tuple[Partition, ImbalanceBreakdown, SolveTrace]:
    """Minimize imbalance on `g`; returns (partition, breakdown, trace).

    Deterministic for a fixed seed with worker_count 1 and no time limit.
    The returned partition additionally satisfies a local-optimum
    certificate: a last polish pass evaluates every candidate move.
    """
    if cfg is None:
        cfg = IlsConfig()
    if g.n_nodes == 0:
        raise DataError("cannot solve an empty graph")

    start = time.monotonic()
    deadline = None if cfg.time_limit is None else start + cfg.time_limit
    nbr_idx, nbr_w = g.adjacency()
    edge_arrays = _edge_arrays(g)
    n = g.n_nodes

    seeds = np.random.SeedSequence(cfg.rng_seed).spawn(cfg.worker_count + 1)
    shared = _SharedBest()

    if cfg.worker_count == 1:
        _run_chain(shared, n, nbr_idx, nbr_w, edge_arrays, cfg,
                   np.random.default_rng(seeds[0]), deadline)
    else:
        threads = [
            threading.Thread(
                target=_run_chain,
                args=(shared, n, nbr_idx, nbr_w, edge_arrays, cfg,
                      np.random.default_rng(seeds[w]), deadline),
            )
            for w in range(cfg.worker_count)
        ]
        for t in threads:
            t.start()
        for t in threads:
            t.join()

    labels = shared.labels
    labels, k = _compact(labels)
    _local_search_inplace(labels, k, nbr_idx, nbr_w, 1.0,
                          np.random.default_rng(seeds[-1]))
    final_total = _exact_total(labels, *edge_arrays)
    shared.offer(final_total, labels)

    partition = Partition(g.node_ids, labels).normalized()
    breakdown = imbalance(g, partition)
    trace = SolveTrace(
        best_imbalance_per_iteration=shared.trace,
        iterations_run=len(shared.trace),
        wall_time=time.monotonic() - start,
        restarts=shared.restarts,
    )
    return partition, breakdown, trace


def write_trace_csv(trace: SolveTrace, path) -> None:
    """Write the trace as `iteration,best_imbalance` rows."""
    import csv
    from pathlib import Path

    with open(Path(path), "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["iteration", "best_imbalance"])
        for i, value in enumerate(trace.best_imbalance_per_iteration):
            writer.writerow([i, repr(value)])
