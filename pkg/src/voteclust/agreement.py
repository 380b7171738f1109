"""Document-wise agreement scoring and the member x member agreement matrix.

Two members get a score per document from a 3x3 weight table over their
expressed votes (For/Abstain/Against); whenever at least one of them did not
express a vote (any of the three absence variants) the document scores 0.
The agreement matrix averages these scores over all documents of the dataset.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError, InsufficientDocuments
from .votes import Vote, VoteDataset

# Row/column order of every weight table.
_EXPRESSED = (Vote.FOR, Vote.ABSTAIN, Vote.AGAINST)


@dataclass(frozen=True)
class WeightTable:
    """A symmetric 3x3 score table over (For, Abstain, Against), entries in [-1, +1]."""

    name: str
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=float)
        if matrix.shape != (3, 3):
            raise DataError(f"weight table must be 3x3, got shape {matrix.shape}")
        if not np.array_equal(matrix, matrix.T):
            raise DataError("weight table must be symmetric")
        if np.abs(matrix).max() > 1.0:
            raise DataError("weight table entries must lie in [-1, +1]")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def half_agreement(cls) -> "WeightTable":
        """Abstention counts as half an agreement with any expressed vote."""
        return cls("half_agreement", np.array([
            [+1.0, +0.5, -1.0],
            [+0.5, +0.5, +0.5],
            [-1.0, +0.5, +1.0],
        ]))

    @classmethod
    def neutral_abstain(cls) -> "WeightTable":
        """Abstention is an absence of opinion: neutral against For/Against,
        full agreement between two abstainers."""
        return cls("neutral_abstain", np.array([
            [+1.0, 0.0, -1.0],
            [0.0, +1.0, 0.0],
            [-1.0, 0.0, +1.0],
        ]))

    @classmethod
    def half_disagreement(cls) -> "WeightTable":
        """Variant of half_agreement with -0.5 for Abstain vs For/Against."""
        return cls("half_disagreement", np.array([
            [+1.0, -0.5, -1.0],
            [-0.5, +0.5, -0.5],
            [-1.0, -0.5, +1.0],
        ]))

    @classmethod
    def custom(cls, matrix, name: str = "custom") -> "WeightTable":
        return cls(name, np.asarray(matrix, dtype=float))


def read_weight_table_csv(path) -> WeightTable:
    """Load a custom 3x3 weight table.

    Expected layout: header `,For,Abstain,Against`, then one row per
    expressed vote in the same order, each with three numeric entries.
    """
    path = Path(path)
    expected = ["For", "Abstain", "Against"]
    rows = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != [""] + expected:
            raise DataError(f"{path}:1: expected header ',For,Abstain,Against'")
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4 or row[0].strip() != expected[len(rows)]:
                raise DataError(
                    f"{path}:{line_no}: expected row label {expected[len(rows)]!r}"
                )
            try:
                rows.append([float(cell) for cell in row[1:]])
            except ValueError:
                raise DataError(f"{path}:{line_no}: non-numeric table entry") from None
            if len(rows) == 3:
                break
    if len(rows) != 3:
        raise DataError(f"{path}: expected 3 table rows, got {len(rows)}")
    return WeightTable.custom(rows, name=path.stem)


def score_pair(vote_u: Vote, vote_v: Vote, table: WeightTable) -> float:
    """Agreement score of two votes on one document.

    Returns 0 whenever either vote is any absence variant, otherwise the
    table entry for the two expressed votes.
    """
    if not (vote_u.is_expressed and vote_v.is_expressed):
        return 0.0
    return float(table.matrix[vote_u.value, vote_v.value])


@dataclass
class AgreementMatrix:
    """Symmetric matrix of average pairwise agreement over `doc_count` documents.

    The diagonal carries no meaning and is stored as zero; all consumers
    ignore it.
    """

    member_ids: list[str]
    values: np.ndarray
    doc_count: int

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        n = len(self.member_ids)
        if values.shape != (n, n):
            raise DataError(f"agreement matrix shape {values.shape} does not match {n} members")
        if not np.allclose(values, values.T, atol=0.0, rtol=0.0):
            raise DataError("agreement matrix must be symmetric")
        if values.size and np.abs(values).max() > 1.0 + 1e-12:
            raise DataError("agreement values must lie in [-1, +1]")
        self.values = values

    @property
    def n_members(self) -> int:
        return len(self.member_ids)


def agreement_matrix(
    ds: VoteDataset,
    table: WeightTable,
    both_cast_denominator: bool = False,
) -> AgreementMatrix:
    """Average the document-wise scores of every member pair (the m_uv matrix).

    By default the average runs over all documents of the dataset, with
    absences contributing 0 to the sum. With `both_cast_denominator=True`
    each pair is instead averaged only over the documents where both members
    expressed a vote (pairs sharing no such document get 0).
    """
    if ds.n_documents < 2:
        raise InsufficientDocuments(
            f"insufficient documents: need at least 2, dataset has {ds.n_documents}"
        )
    if ds.n_members < 2:
        raise DataError(f"need at least 2 members, dataset has {ds.n_members}")

    codes = ds.votes
    expressed = codes <= Vote.AGAINST.value  # (n_members, n_docs)

    # One-hot encode expressed votes per document, zero rows for absences,
    # then contract against the table: sum_d onehot_u(d) @ T @ onehot_v(d).
    n, d = codes.shape
    onehot = np.zeros((n, d, 3), dtype=float)
    rows, cols = np.nonzero(expressed)
    onehot[rows, cols, codes[rows, cols]] = 1.0
    weighted = onehot @ table.matrix  # (n, d, 3)
    score_sums = weighted.reshape(n, d * 3) @ onehot.reshape(n, d * 3).T

    if both_cast_denominator:
        shared = expressed.astype(float) @ expressed.astype(float).T
        values = np.divide(score_sums, shared, out=np.zeros_like(score_sums), where=shared > 0)
    else:
        values = score_sums / ds.n_documents

    values = (values + values.T) / 2.0  # exact symmetry despite float reduction order
    np.fill_diagonal(values, 0.0)
    np.clip(values, -1.0, 1.0, out=values)
    return AgreementMatrix(ds.member_ids, values, ds.n_documents)


def agreement_histogram(m: AgreementMatrix, bin_width: float) -> list[tuple[float, int]]:
    """Histogram of the strict upper triangle of the matrix.

    Bins tile [-1, +1] left-closed/right-open with the final bin closed at
    +1; returns (bin lower edge, count) for every bin. Counts sum to
    n*(n-1)/2.
    """
    if not (0.0 < bin_width <= 2.0):
        raise DataError(f"bin width must be in (0, 2], got {bin_width}")
    n_bins = int(np.ceil(2.0 / bin_width - 1e-9))
    iu = np.triu_indices(m.n_members, k=1)
    pairs = m.values[iu]
    idx = np.floor((pairs + 1.0) / bin_width).astype(int)
    np.clip(idx, 0, n_bins - 1, out=idx)
    counts = np.bincount(idx, minlength=n_bins)
    return [(-1.0 + i * bin_width, int(counts[i])) for i in range(n_bins)]


def write_agreement_csv(m: AgreementMatrix, path) -> None:
    """Export the full symmetric matrix with an id header row and column."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["mep_id"] + m.member_ids)
        for i, mep_id in enumerate(m.member_ids):
            writer.writerow([mep_id] + [f"{v:.6f}" for v in m.values[i]])


def read_agreement_csv(path, doc_count: int = 0) -> AgreementMatrix:
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: file is empty")
        if not header or header[0] != "mep_id":
            raise DataError(f"{path}:1: expected header starting with 'mep_id'")
        member_ids = header[1:]
        rows = []
        row_ids = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(member_ids) + 1:
                raise DataError(f"{path}:{line_no}: expected {len(member_ids) + 1} columns, got {len(row)}")
            row_ids.append(row[0])
            try:
                rows.append([float(v) for v in row[1:]])
            except ValueError as exc:
                raise DataError(f"{path}:{line_no}: {exc}") from None
    if row_ids != member_ids:
        raise DataError(f"{path}: row ids do not match header ids")
    values = np.array(rows, dtype=float) if rows else np.zeros((0, 0))
    values = (values + values.T) / 2.0  # 6-decimal export may round asymmetrically
    return AgreementMatrix(member_ids, values, doc_count)


def write_histogram_csv(bins: list[tuple[float, int]], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["bin_lower", "count"])
        for lower, count in bins:
            writer.writerow([f"{lower:.6f}", count])
