"""Partition comparison, synthetic benchmarks, and experiment orchestration.

The experiment driver runs the full protocol at any scale: slice the vote
data, build the agreement graph, run the signed-graph solver plus the
unsigned baselines, and judge everything by signed imbalance and pairwise
NMI.
"""

from __future__ import annotations

import datetime
import json
import math
import re
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .agreement import WeightTable, agreement_matrix
from .community import run_baseline, write_dendrogram_csv
from .errors import DataError, InsufficientDocuments
from .graphs import graph_from_agreement
from .ils import IlsConfig, solve
from .partition import Partition, write_partition_csv
from .report import RunReport
from .votes import Document, Member, Vote, VoteDataset, filter_dataset


def nmi(p: Partition, q: Partition) -> float:
    """Normalized mutual information between two partitions, in [0, 1].

    Uses natural-log entropies and the arithmetic-mean normalization
    2I/(H(p)+H(q)). Two zero-entropy partitions are identical up to
    relabeling, so they score 1; if exactly one side has zero entropy the
    partitions differ and the score is 0.
    """
    if set(p.node_ids) != set(q.node_ids):
        raise DataError("partitions cover different node sets")
    q_map = q.as_mapping()
    a = np.unique(p.labels, return_inverse=True)[1]
    b = np.unique(
        np.array([q_map[n] for n in p.node_ids]), return_inverse=True
    )[1]
    n = len(p.node_ids)
    contingency = np.zeros((a.max() + 1, b.max() + 1))
    np.add.at(contingency, (a, b), 1.0)
    row = contingency.sum(axis=1)
    col = contingency.sum(axis=0)

    h_p = -math.fsum((r / n) * math.log(r / n) for r in row if r > 0)
    h_q = -math.fsum((c / n) * math.log(c / n) for c in col if c > 0)
    if h_p == 0.0 and h_q == 0.0:
        return 1.0
    if h_p == 0.0 or h_q == 0.0:
        return 0.0

    info = math.fsum(
        (nij / n) * math.log(n * nij / (row[i] * col[j]))
        for (i, j), nij in np.ndenumerate(contingency)
        if nij > 0
    )
    return min(1.0, max(0.0, 2.0 * info / (h_p + h_q)))


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of a planted-bloc voting benchmark."""

    n_members: int
    n_docs: int
    n_blocs: int
    cohesion: float
    abstain_rate: float = 0.0
    absence_rate: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.n_members < 1 or self.n_docs < 1:
            raise DataError("n_members and n_docs must be positive")
        if not (1 <= self.n_blocs <= self.n_members):
            raise DataError("n_blocs must be between 1 and n_members")
        for label in ("cohesion", "abstain_rate", "absence_rate"):
            value = getattr(self, label)
            if not (0.0 <= value <= 1.0):
                raise DataError(f"{label} must be a probability in [0, 1], got {value}")


def _member_ids(spec: SyntheticSpec) -> list[str]:
    width = max(3, len(str(spec.n_members - 1)))
    return [f"m{i:0{width}d}" for i in range(spec.n_members)]


def generate_synthetic_votes(spec: SyntheticSpec) -> VoteDataset:
    """Voting records with planted blocs.

    Members join blocs round-robin. Per document each bloc draws a line
    (For or Against, uniformly); a member follows its bloc's line with
    probability `cohesion`, otherwise votes the opposite. The cast vote is
    then replaced by Abstain at `abstain_rate` and by Absent at
    `absence_rate` (absence wins when both trigger). Deterministic per seed.
    """
    rng = np.random.default_rng(spec.rng_seed)
    ids = _member_ids(spec)
    blocs = np.arange(spec.n_members) % spec.n_blocs

    members = [
        Member(mep_id=ids[i], name=f"Member {i}", country="SYN", group=f"bloc{blocs[i]}")
        for i in range(spec.n_members)
    ]
    start = datetime.date(2010, 1, 1)
    doc_width = max(3, len(str(spec.n_docs - 1)))
    documents = [
        Document(
            doc_id=f"d{j:0{doc_width}d}",
            policy="synthetic",
            date=start + datetime.timedelta(days=j),
        )
        for j in range(spec.n_docs)
    ]

    lines = rng.integers(0, 2, size=(spec.n_docs, spec.n_blocs))
    conform = rng.random((spec.n_docs, spec.n_members)) < spec.cohesion
    abstain = rng.random((spec.n_docs, spec.n_members)) < spec.abstain_rate
    absent = rng.random((spec.n_docs, spec.n_members)) < spec.absence_rate

    member_line = lines[:, blocs]
    cast = np.where(conform, member_line, 1 - member_line)
    votes = np.where(cast == 0, int(Vote.FOR), int(Vote.AGAINST))
    votes = np.where(abstain, int(Vote.ABSTAIN), votes)
    votes = np.where(absent, int(Vote.ABSENT), votes)

    return VoteDataset(documents, members, votes.T.astype(np.int8))


def planted_partition(spec: SyntheticSpec) -> Partition:
    """The ground-truth bloc assignment used by generate_synthetic_votes."""
    return Partition(_member_ids(spec), np.arange(spec.n_members) % spec.n_blocs)


def _slice_label(policy, period) -> str:
    parts = []
    if policy is not None:
        parts.append(f"policy={policy}")
    if period is not None:
        parts.append(f"{period[0].isoformat()}..{period[1].isoformat()}")
    return " ".join(parts) if parts else "all"


def _file_token(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "-", label)


def write_nmi_csv(labels: list[str], matrix: np.ndarray, path) -> None:
    """Square pairwise-NMI table with row/column labels."""
    import csv

    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow([""] + labels)
        for label, row in zip(labels, matrix):
            writer.writerow([label] + [f"{v:.6f}" for v in row])


def run_experiment(
    ds: VoteDataset,
    table: WeightTable,
    filters: list | None = None,
    solver_cfg: IlsConfig | None = None,
    baselines: list | None = None,
    filler_weight: float = 1.0,
    out_dir=None,
) -> list[RunReport]:
    """Run the full protocol on each data slice.

    `filters` is a list of (policy, (from, to)) pairs; empty or None means a
    single slice over the whole dataset. `baselines` is a list of
    (algorithm, view) pairs, defaulting to both algorithms on both views.
    Slices with fewer than two documents are recorded as skipped and the run
    continues; if every slice is skipped, InsufficientDocuments is raised.
    """
    if solver_cfg is None:
        solver_cfg = IlsConfig()
    if baselines is None:
        baselines = [
            ("fastgreedy", "positive"),
            ("fastgreedy", "compneg"),
            ("edgebetweenness", "positive"),
            ("edgebetweenness", "compneg"),
        ]
    slices = list(filters) if filters else [(None, None)]
    out_path = Path(out_dir) if out_dir is not None else None
    if out_path is not None:
        out_path.mkdir(parents=True, exist_ok=True)

    reports: list[RunReport] = []
    summary: list[dict] = []
    for policy, period in slices:
        label = _slice_label(policy, period)
        try:
            ds_slice = filter_dataset(ds, policy=policy, period=period)
        except InsufficientDocuments as exc:
            summary.append({"slice": label, "skipped": True, "reason": str(exc)})
            continue

        g = graph_from_agreement(agreement_matrix(ds_slice, table))
        slice_reports: list[RunReport] = []

        partition, breakdown, trace = solve(g, solver_cfg)
        ils_report = RunReport(
            algorithm="ils",
            view=None,
            partition=partition,
            imbalance=breakdown,
            k=partition.k,
            modularity=None,
            wall_ms=trace.wall_time * 1000.0,
            config=asdict(solver_cfg),
            slice_label=label,
        )
        slice_reports.append(ils_report)

        for algorithm, view in baselines:
            report = run_baseline(g, algorithm, view, filler_weight)
            report.slice_label = label
            slice_reports.append(report)

        labels = [
            r.algorithm if r.view is None else f"{r.algorithm}:{r.view}"
            for r in slice_reports
        ]
        matrix = np.ones((len(slice_reports), len(slice_reports)))
        for i in range(len(slice_reports)):
            for j in range(i + 1, len(slice_reports)):
                value = nmi(slice_reports[i].partition, slice_reports[j].partition)
                matrix[i, j] = matrix[j, i] = value

        if out_path is not None:
            token = _file_token(label)
            for name, report in zip(labels, slice_reports):
                write_partition_csv(
                    report.partition,
                    out_path / f"{token}_{_file_token(name)}.partition.csv",
                )
                if hasattr(report, "dendrogram"):
                    write_dendrogram_csv(
                        report.dendrogram,
                        out_path / f"{token}_{_file_token(name)}.dendrogram.csv",
                    )
            write_nmi_csv(labels, matrix, out_path / f"{token}_nmi.csv")

        summary.append(
            {
                "slice": label,
                "skipped": False,
                "reports": [r.summary() for r in slice_reports],
            }
        )
        reports.extend(slice_reports)

    if not reports:
        raise InsufficientDocuments("every requested slice was skipped")
    if out_path is not None:
        with open(out_path / "summary.json", "w", encoding="utf-8") as handle:
            json.dump({"slices": summary}, handle, indent=2)
            handle.write("\n")
    return reports
