"""Shared fixtures and the acceptance-summary terminal hook."""

import re

import datetime

import numpy as np
import pytest

from voteclust import Document, Member, SignedGraph, UnsignedGraph, VoteDataset


@pytest.fixture
def frustrated_triangle():
    # Two positive links and one negative link closing the cycle: no
    # partition can satisfy all three, the best reachable imbalance is 1.
    return SignedGraph(
        ["a", "b", "c"],
        [("a", "b", 1.0, "+"), ("b", "c", 1.0, "+"), ("a", "c", 1.0, "-")],
    )


@pytest.fixture
def two_cliques():
    """Two positive 5-cliques joined by three negative links."""
    nodes = [f"n{i}" for i in range(10)]
    links = []
    for block in (range(0, 5), range(5, 10)):
        block = list(block)
        for i in range(len(block)):
            for j in range(i + 1, len(block)):
                links.append((nodes[block[i]], nodes[block[j]], 1.0, "+"))
    links += [
        ("n0", "n5", 1.0, "-"),
        ("n1", "n6", 1.0, "-"),
        ("n2", "n7", 1.0, "-"),
    ]
    return SignedGraph(nodes, links)


@pytest.fixture
def bridged_triangles():
    """Two unit-weight triangles connected by a single bridge link."""
    return UnsignedGraph(
        ["a", "b", "c", "d", "e", "f"],
        [
            ("a", "b", 1.0),
            ("a", "c", 1.0),
            ("b", "c", 1.0),
            ("d", "e", 1.0),
            ("d", "f", 1.0),
            ("e", "f", 1.0),
            ("c", "d", 1.0),
        ],
    )


@pytest.fixture
def small_dataset():
    """Three members voting on three documents, no missing cells."""
    votes = np.array(
        [
            [0, 0, 2],  # alice: For, For, Against
            [0, 2, 2],  # bob:   For, Against, Against
            [2, 0, 1],  # carol: Against, For, Abstain
        ],
        dtype=np.int8,
    )
    return VoteDataset(
        documents=[
            Document("d1", "budget", datetime.date(2004, 1, 10)),
            Document("d2", "budget", datetime.date(2004, 2, 10)),
            Document("d3", "trade", datetime.date(2004, 3, 10)),
        ],
        members=[
            Member("m1", "Alice", "FR", "G1"),
            Member("m2", "Bob", "DE", "G1"),
            Member("m3", "Carol", "FR", "G2"),
        ],
        votes=votes,
    )


@pytest.fixture
def random_signed_graph():
    """Factory for random signed graphs with reproducible structure."""

    def make(rng, n, density=0.5, sign_ratio=0.5):
        nodes = [f"v{i}" for i in range(n)]
        links = []
        for a in range(n):
            for b in range(a + 1, n):
                if rng.random() < density:
                    weight = 1.0 - rng.random()
                    sign = "+" if rng.random() < sign_ratio else "-"
                    links.append((nodes[a], nodes[b], weight, sign))
        return SignedGraph(nodes, links)

    return make


_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one pass/fail line per acceptance criterion."""
    outcomes = {}
    for status in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(status, []):
            match = _CRITERION.search(report.nodeid)
            if match:
                num = int(match.group(1))
                label = match.group(2).replace("_", " ")
                outcomes[num] = (status, label)
    if not outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(outcomes):
        status, label = outcomes[num]
        verdict = "PASS" if status == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict} criterion {num}: {label}")
