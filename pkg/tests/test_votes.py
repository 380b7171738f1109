import datetime

import numpy as np
import pytest

from voteclust import (
    DataError,
    Document,
    InsufficientDocuments,
    Member,
    Vote,
    VoteDataset,
    filter_dataset,
    load_dataset,
    parse_vote_token,
    save_dataset,
)


def write_csvs(tmp_path, documents, members, votes):
    docs_path = tmp_path / "documents.csv"
    members_path = tmp_path / "members.csv"
    votes_path = tmp_path / "votes.csv"
    docs_path.write_text("doc_id,policy,date\n" + "".join(f"{r}\n" for r in documents))
    members_path.write_text("mep_id,name,country,group\n" + "".join(f"{r}\n" for r in members))
    votes_path.write_text("doc_id,mep_id,vote\n" + "".join(f"{r}\n" for r in votes))
    return docs_path, members_path, votes_path


def test_parse_vote_token_case_insensitive():
    assert parse_vote_token("for") is Vote.FOR
    assert parse_vote_token("AGAINST") is Vote.AGAINST
    assert parse_vote_token("  Abstain ") is Vote.ABSTAIN
    assert parse_vote_token("absent") is Vote.ABSENT
    assert parse_vote_token("did_not_vote") is Vote.DID_NOT_VOTE
    assert parse_vote_token("documented_absence") is Vote.DOCUMENTED_ABSENCE


def test_parse_vote_token_unknown_lists_all_six():
    with pytest.raises(DataError) as err:
        parse_vote_token("maybe")
    message = str(err.value)
    for name in ("FOR", "ABSTAIN", "AGAINST", "ABSENT", "DID_NOT_VOTE", "DOCUMENTED_ABSENCE"):
        assert name in message


def test_expressed_votes():
    expressed = {v for v in Vote if v.is_expressed}
    assert expressed == {Vote.FOR, Vote.ABSTAIN, Vote.AGAINST}


def test_load_dataset_basic(tmp_path):
    paths = write_csvs(
        tmp_path,
        ["d1,budget,2004-01-10", "d2,trade,2004-02-01"],
        ["m1,Alice,FR,G1", "m2,Bob,DE,G2"],
        ["d1,m1,For", "d1,m2,against", "d2,m1,Abstain"],
    )
    ds = load_dataset(paths[0], paths[1], paths[2])
    assert ds.n_members == 2 and ds.n_documents == 2
    assert ds.votes[0, 0] == Vote.FOR
    assert ds.votes[1, 0] == Vote.AGAINST
    assert ds.votes[0, 1] == Vote.ABSTAIN
    # cells not listed in votes.csv default to absence
    assert ds.votes[1, 1] == Vote.ABSENT


def test_load_dataset_unknown_token_names_file_and_line(tmp_path):
    paths = write_csvs(
        tmp_path,
        ["d1,budget,2004-01-10"],
        ["m1,Alice,FR,G1"],
        ["d1,m1,Perhaps"],
    )
    with pytest.raises(DataError) as err:
        load_dataset(*paths)
    assert "votes.csv:2" in str(err.value)
    assert "Perhaps" in str(err.value)


def test_load_dataset_unknown_ids(tmp_path):
    paths = write_csvs(
        tmp_path,
        ["d1,budget,2004-01-10"],
        ["m1,Alice,FR,G1"],
        ["d9,m1,For"],
    )
    with pytest.raises(DataError, match="unknown doc_id"):
        load_dataset(*paths)
    paths = write_csvs(
        tmp_path,
        ["d1,budget,2004-01-10"],
        ["m1,Alice,FR,G1"],
        ["d1,m9,For"],
    )
    with pytest.raises(DataError, match="unknown mep_id"):
        load_dataset(*paths)


def test_load_dataset_duplicates(tmp_path):
    paths = write_csvs(
        tmp_path,
        ["d1,budget,2004-01-10", "d1,trade,2004-02-01"],
        ["m1,Alice,FR,G1"],
        [],
    )
    with pytest.raises(DataError, match="duplicate doc_id"):
        load_dataset(*paths)
    paths = write_csvs(
        tmp_path,
        ["d1,budget,2004-01-10"],
        ["m1,Alice,FR,G1"],
        ["d1,m1,For", "d1,m1,Against"],
    )
    with pytest.raises(DataError, match="duplicate vote"):
        load_dataset(*paths)


def test_load_dataset_bad_header_and_date(tmp_path):
    docs_path = tmp_path / "documents.csv"
    docs_path.write_text("id,policy,date\nd1,budget,2004-01-10\n")
    members_path = tmp_path / "members.csv"
    members_path.write_text("mep_id,name,country,group\n")
    votes_path = tmp_path / "votes.csv"
    votes_path.write_text("doc_id,mep_id,vote\n")
    with pytest.raises(DataError, match="header"):
        load_dataset(docs_path, members_path, votes_path)

    docs_path.write_text("doc_id,policy,date\nd1,budget,10/01/2004\n")
    with pytest.raises(DataError, match="invalid date"):
        load_dataset(docs_path, members_path, votes_path)


def test_save_load_round_trip(tmp_path, small_dataset):
    # include the rarer absence variants so they survive the trip
    votes = small_dataset.votes.copy()
    votes[0, 2] = Vote.DID_NOT_VOTE
    votes[1, 0] = Vote.DOCUMENTED_ABSENCE
    votes[2, 2] = Vote.ABSENT
    ds = VoteDataset(small_dataset.documents, small_dataset.members, votes)
    paths = (tmp_path / "d.csv", tmp_path / "m.csv", tmp_path / "v.csv")
    save_dataset(ds, *paths)
    assert load_dataset(*paths) == ds


def test_filter_by_policy(small_dataset):
    out = filter_dataset(small_dataset, policy="budget")
    assert [d.doc_id for d in out.documents] == ["d1", "d2"]
    assert out.members == small_dataset.members
    assert np.array_equal(out.votes, small_dataset.votes[:, :2])


def test_filter_by_period(small_dataset):
    period = (datetime.date(2004, 1, 1), datetime.date(2004, 2, 28))
    out = filter_dataset(small_dataset, period=period)
    assert [d.doc_id for d in out.documents] == ["d1", "d2"]


def test_filter_no_predicates_is_identity(small_dataset):
    out = filter_dataset(small_dataset)
    assert out == small_dataset
    assert out is not small_dataset


def test_filter_idempotent(small_dataset):
    once = filter_dataset(small_dataset, policy="budget")
    twice = filter_dataset(once, policy="budget")
    assert once == twice


def test_filter_insufficient_documents(small_dataset):
    with pytest.raises(InsufficientDocuments):
        filter_dataset(small_dataset, policy="trade")  # only one doc matches


def test_filter_unknown_policy(small_dataset):
    with pytest.raises(DataError, match="unknown policy"):
        filter_dataset(small_dataset, policy="fisheries")


def test_filter_inverted_period(small_dataset):
    with pytest.raises(DataError, match="after end"):
        filter_dataset(
            small_dataset,
            period=(datetime.date(2005, 1, 1), datetime.date(2004, 1, 1)),
        )


def test_dataset_validation():
    doc = Document("d1", "budget", datetime.date(2004, 1, 10))
    member = Member("m1", "Alice", "FR", "G1")
    with pytest.raises(DataError, match="shape"):
        VoteDataset([doc], [member], np.zeros((2, 1), dtype=np.int8))
    with pytest.raises(DataError, match="outside"):
        VoteDataset([doc], [member], np.array([[7]], dtype=np.int8))
    with pytest.raises(DataError, match="duplicate mep_id"):
        VoteDataset([doc], [member, member], np.zeros((2, 1), dtype=np.int8))
