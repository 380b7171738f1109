"""Roll-call vote datasets: parsing, validation, filtering, serialization.

A dataset is a dense members x documents matrix of vote values plus the
document and member metadata needed for filtering. The three CSV schemas are:

    members.csv    mep_id,name,country,group
    documents.csv  doc_id,policy,date          (date is YYYY-MM-DD)
    votes.csv      doc_id,mep_id,vote          (vote token, case-insensitive)

Cells missing from votes.csv default to ABSENT; the two other non-vote
variants (DID_NOT_VOTE, DOCUMENTED_ABSENCE) are kept distinct at this stage
and only collapse to "absence" when agreement scores are computed.
"""

from __future__ import annotations

import csv
import datetime
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path

import numpy as np

from .errors import DataError, InsufficientDocuments


class Vote(IntEnum):
    """One cell of the vote matrix. FOR/ABSTAIN/AGAINST are expressed votes."""

    FOR = 0
    ABSTAIN = 1
    AGAINST = 2
    ABSENT = 3
    DID_NOT_VOTE = 4
    DOCUMENTED_ABSENCE = 5

    @property
    def is_expressed(self) -> bool:
        return self.value <= Vote.AGAINST.value


VOTE_TOKENS = tuple(v.name for v in Vote)
_TOKEN_TO_VOTE = {v.name: v for v in Vote}


def parse_vote_token(token: str) -> Vote:
    vote = _TOKEN_TO_VOTE.get(token.strip().upper())
    if vote is None:
        raise DataError(
            f"unknown vote token {token.strip()!r} (expected one of: {', '.join(VOTE_TOKENS)})"
        )
    return vote


@dataclass(frozen=True)
class Document:
    doc_id: str
    policy: str
    date: datetime.date


@dataclass(frozen=True)
class Member:
    mep_id: str
    name: str
    country: str
    group: str


class VoteDataset:
    """Immutable container for documents, members and the vote matrix.

    `votes` is an int8 array of shape (len(members), len(documents)) holding
    `Vote` values; row/column order matches the member/document lists.
    """

    def __init__(self, documents: list[Document], members: list[Member], votes: np.ndarray):
        votes = np.asarray(votes, dtype=np.int8)
        if votes.shape != (len(members), len(documents)):
            raise DataError(
                f"vote matrix shape {votes.shape} does not match "
                f"{len(members)} members x {len(documents)} documents"
            )
        if votes.size and (votes.min() < 0 or votes.max() > max(Vote).value):
            raise DataError("vote matrix contains values outside the Vote enumeration")
        _check_unique((d.doc_id for d in documents), "doc_id")
        _check_unique((m.mep_id for m in members), "mep_id")
        self.documents = list(documents)
        self.members = list(members)
        self.votes = votes
        self.votes.setflags(write=False)

    @property
    def n_members(self) -> int:
        return len(self.members)

    @property
    def n_documents(self) -> int:
        return len(self.documents)

    @property
    def member_ids(self) -> list[str]:
        return [m.mep_id for m in self.members]

    @property
    def policies(self) -> set[str]:
        return {d.policy for d in self.documents}

    def __eq__(self, other) -> bool:
        if not isinstance(other, VoteDataset):
            return NotImplemented
        return (
            self.documents == other.documents
            and self.members == other.members
            and np.array_equal(self.votes, other.votes)
        )

    def __repr__(self) -> str:
        return f"VoteDataset({self.n_members} members, {self.n_documents} documents)"


def _check_unique(ids, field: str) -> None:
    seen = set()
    for value in ids:
        if value in seen:
            raise DataError(f"duplicate {field} {value!r}")
        seen.add(value)


def _read_rows(path: Path, expected_header: list[str]):
    """Yield (line_number, row) for a CSV file, validating the header."""
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: file is empty, expected header {','.join(expected_header)}")
        if [h.strip().lower() for h in header] != expected_header:
            raise DataError(
                f"{path}:1: bad header {','.join(header)!r}, expected {','.join(expected_header)!r}"
            )
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(expected_header):
                raise DataError(
                    f"{path}:{line_no}: expected {len(expected_header)} columns, got {len(row)}"
                )
            yield line_no, [cell.strip() for cell in row]


def _parse_date(text: str, context: str) -> datetime.date:
    try:
        return datetime.date.fromisoformat(text)
    except ValueError:
        raise DataError(f"{context}: invalid date {text!r}, expected YYYY-MM-DD")


def load_dataset(documents_path, members_path, votes_path) -> VoteDataset:
    """Load and cross-validate the three CSV files into a VoteDataset.

    Raises DataError naming the file and line for malformed rows, unknown
    vote tokens, unknown ids, and duplicates. Cells not present in the votes
    file default to ABSENT.
    """
    documents_path = Path(documents_path)
    members_path = Path(members_path)
    votes_path = Path(votes_path)

    documents: list[Document] = []
    for line_no, (doc_id, policy, date_text) in _read_rows(documents_path, ["doc_id", "policy", "date"]):
        documents.append(Document(doc_id, policy, _parse_date(date_text, f"{documents_path}:{line_no} column date")))

    members: list[Member] = []
    for _line_no, (mep_id, name, country, group) in _read_rows(members_path, ["mep_id", "name", "country", "group"]):
        members.append(Member(mep_id, name, country, group))

    try:
        _check_unique((d.doc_id for d in documents), "doc_id")
        _check_unique((m.mep_id for m in members), "mep_id")
    except DataError as exc:
        raise DataError(f"{exc}") from None

    doc_index = {d.doc_id: i for i, d in enumerate(documents)}
    member_index = {m.mep_id: i for i, m in enumerate(members)}
    votes = np.full((len(members), len(documents)), Vote.ABSENT.value, dtype=np.int8)
    filled = np.zeros(votes.shape, dtype=bool)

    for line_no, (doc_id, mep_id, token) in _read_rows(votes_path, ["doc_id", "mep_id", "vote"]):
        if doc_id not in doc_index:
            raise DataError(f"{votes_path}:{line_no}: unknown doc_id {doc_id!r}")
        if mep_id not in member_index:
            raise DataError(f"{votes_path}:{line_no}: unknown mep_id {mep_id!r}")
        try:
            vote = parse_vote_token(token)
        except DataError as exc:
            raise DataError(f"{votes_path}:{line_no} column vote: {exc}") from None
        i, j = member_index[mep_id], doc_index[doc_id]
        if filled[i, j]:
            raise DataError(
                f"{votes_path}:{line_no}: duplicate vote for mep_id {mep_id!r} on doc_id {doc_id!r}"
            )
        filled[i, j] = True
        votes[i, j] = vote.value

    return VoteDataset(documents, members, votes)


def save_dataset(ds: VoteDataset, documents_path, members_path, votes_path) -> None:
    """Write a dataset back to the three CSV schemas (inverse of load_dataset).

    ABSENT cells are omitted from votes.csv since they are the default; the
    other absence variants are written out so they round-trip.
    """
    with open(documents_path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["doc_id", "policy", "date"])
        for doc in ds.documents:
            writer.writerow([doc.doc_id, doc.policy, doc.date.isoformat()])
    with open(members_path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["mep_id", "name", "country", "group"])
        for member in ds.members:
            writer.writerow([member.mep_id, member.name, member.country, member.group])
    with open(votes_path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["doc_id", "mep_id", "vote"])
        for i, member in enumerate(ds.members):
            for j, doc in enumerate(ds.documents):
                value = Vote(int(ds.votes[i, j]))
                if value is not Vote.ABSENT:
                    writer.writerow([doc.doc_id, member.mep_id, value.name])


def filter_dataset(
    ds: VoteDataset,
    policy: str | None = None,
    period: tuple[datetime.date, datetime.date] | None = None,
) -> VoteDataset:
    """Return a new dataset keeping only documents matching both predicates.

    `period` is an inclusive (start, end) date interval. Members and document
    order are preserved; the input dataset is not modified. Raises
    InsufficientDocuments if fewer than 2 documents survive.
    """
    if policy is not None and policy not in ds.policies:
        raise DataError(f"unknown policy {policy!r}; dataset has: {', '.join(sorted(ds.policies))}")
    if period is not None:
        start, end = period
        if start > end:
            raise DataError(f"period start {start} is after end {end}")

    keep = []
    for j, doc in enumerate(ds.documents):
        if policy is not None and doc.policy != policy:
            continue
        if period is not None and not (period[0] <= doc.date <= period[1]):
            continue
        keep.append(j)

    if len(keep) < 2:
        raise InsufficientDocuments(
            f"insufficient documents: filter left {len(keep)} document(s), need at least 2"
        )
    if len(keep) == ds.n_documents:
        return VoteDataset(ds.documents, ds.members, ds.votes.copy())
    return VoteDataset([ds.documents[j] for j in keep], ds.members, ds.votes[:, keep])
