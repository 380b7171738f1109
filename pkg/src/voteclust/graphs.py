"""Weighted signed graphs and the unsigned views fed to community detection.

Graphs are simple and undirected: at most one link per unordered node pair,
no self-links, weights strictly in (0, 1]. A signed link additionally carries
a sign in {+, -}. Graphs are immutable once constructed; every derivation
returns a new graph.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .errors import DataError
from .agreement import AgreementMatrix

POSITIVE = "+"
NEGATIVE = "-"


def _check_weight(weight: float, context: str) -> float:
    weight = float(weight)
    if not (0.0 < weight <= 1.0):
        raise DataError(f"{context}: link weight must be in (0, 1], got {weight}")
    return weight


class _GraphBase:
    """Shared node bookkeeping; links live in subclasses as {(i, j): value}, i < j."""

    def __init__(self, node_ids):
        self.node_ids = tuple(str(n) for n in node_ids)
        if len(set(self.node_ids)) != len(self.node_ids):
            raise DataError("duplicate node ids")
        self._index = {n: i for i, n in enumerate(self.node_ids)}

    @property
    def n_nodes(self) -> int:
        return len(self.node_ids)

    def _pair_indices(self, u, v, context: str) -> tuple[int, int]:
        try:
            i, j = self._index[str(u)], self._index[str(v)]
        except KeyError as exc:
            raise DataError(f"{context}: unknown node id {exc.args[0]!r}") from None
        if i == j:
            raise DataError(f"{context}: self-link on node {u!r}")
        return (i, j) if i < j else (j, i)


class SignedGraph(_GraphBase):
    """Undirected graph whose links carry a sign and a weight in (0, 1].

    Internally a link is stored as a signed weight (negative value = negative
    link); `links()` yields the (u, v, weight, sign) view.
    """

    def __init__(self, node_ids, links=()):
        super().__init__(node_ids)
        edges: dict[tuple[int, int], float] = {}
        for u, v, weight, sign in links:
            key = self._pair_indices(u, v, "signed link")
            if key in edges:
                raise DataError(f"duplicate link between {u!r} and {v!r}")
            weight = _check_weight(weight, f"link {u!r}-{v!r}")
            if sign not in (POSITIVE, NEGATIVE):
                raise DataError(f"link {u!r}-{v!r}: sign must be '+' or '-', got {sign!r}")
            edges[key] = weight if sign == POSITIVE else -weight
        self._edges = edges
        self._adjacency = None

    @classmethod
    def from_signed_weights(cls, node_ids, signed: dict[tuple[str, str], float]) -> "SignedGraph":
        links = [
            (u, v, abs(w), POSITIVE if w > 0 else NEGATIVE) for (u, v), w in signed.items()
        ]
        return cls(node_ids, links)

    @property
    def n_links(self) -> int:
        return len(self._edges)

    def links(self):
        """Yield (u_id, v_id, weight, sign) for every link, in insertion order."""
        for (i, j), w in self._edges.items():
            yield self.node_ids[i], self.node_ids[j], abs(w), POSITIVE if w > 0 else NEGATIVE

    def link(self, u, v):
        """(weight, sign) of the link between u and v, or None."""
        w = self._edges.get(self._pair_indices(u, v, "link lookup"))
        if w is None:
            return None
        return abs(w), POSITIVE if w > 0 else NEGATIVE

    def signed_edge_items(self):
        """Raw iterator of ((i, j), signed_weight) over node indices."""
        return self._edges.items()

    @property
    def total_weight(self) -> float:
        return math.fsum(abs(w) for w in self._edges.values())

    @property
    def positive_weight(self) -> float:
        return math.fsum(w for w in self._edges.values() if w > 0)

    @property
    def negative_weight(self) -> float:
        return math.fsum(-w for w in self._edges.values() if w < 0)

    def adjacency(self):
        """Per-node neighbor index arrays and signed weight arrays (cached)."""
        if self._adjacency is None:
            nbrs: list[list[int]] = [[] for _ in range(self.n_nodes)]
            wts: list[list[float]] = [[] for _ in range(self.n_nodes)]
            for (i, j), w in self._edges.items():
                nbrs[i].append(j)
                wts[i].append(w)
                nbrs[j].append(i)
                wts[j].append(w)
            self._adjacency = (
                [np.array(a, dtype=np.intp) for a in nbrs],
                [np.array(a, dtype=float) for a in wts],
            )
        return self._adjacency

    def __repr__(self) -> str:
        pos = sum(1 for w in self._edges.values() if w > 0)
        return f"SignedGraph({self.n_nodes} nodes, {pos} positive / {self.n_links - pos} negative links)"


class UnsignedGraph(_GraphBase):
    """Undirected weighted graph, weights in (0, 1]."""

    def __init__(self, node_ids, links=()):
        super().__init__(node_ids)
        edges: dict[tuple[int, int], float] = {}
        for u, v, weight in links:
            key = self._pair_indices(u, v, "link")
            if key in edges:
                raise DataError(f"duplicate link between {u!r} and {v!r}")
            edges[key] = _check_weight(weight, f"link {u!r}-{v!r}")
        self._edges = edges

    @property
    def n_links(self) -> int:
        return len(self._edges)

    def links(self):
        for (i, j), w in self._edges.items():
            yield self.node_ids[i], self.node_ids[j], w

    def link_weight(self, u, v):
        return self._edges.get(self._pair_indices(u, v, "link lookup"))

    def edge_items(self):
        return self._edges.items()

    @property
    def total_weight(self) -> float:
        return math.fsum(self._edges.values())

    def __repr__(self) -> str:
        return f"UnsignedGraph({self.n_nodes} nodes, {self.n_links} links)"


def graph_from_agreement(m: AgreementMatrix) -> SignedGraph:
    """Map the agreement matrix to a signed graph.

    Positive entries become positive links weighted by the entry, negative
    entries negative links weighted by its absolute value; zero entries
    produce no link (a sign is undefined at 0 and weights must be positive).
    """
    g = SignedGraph(m.member_ids)
    edges = {}
    n = m.n_members
    for i in range(n):
        for j in range(i + 1, n):
            value = m.values[i, j]
            if value != 0.0:
                edges[(i, j)] = float(value)
    g._edges = edges
    return g


def positive_subgraph(g: SignedGraph) -> UnsignedGraph:
    """Keep exactly the positive links with their weights; node set unchanged."""
    out = UnsignedGraph(g.node_ids)
    out._edges = {key: w for key, w in g.signed_edge_items() if w > 0}
    return out


def negative_subgraph(g: SignedGraph) -> UnsignedGraph:
    """Keep exactly the negative links with their weights; node set unchanged."""
    out = UnsignedGraph(g.node_ids)
    out._edges = {key: -w for key, w in g.signed_edge_items() if w < 0}
    return out


def complementary_negative_graph(g: SignedGraph, filler_weight: float = 1.0) -> UnsignedGraph:
    """All node pairs except the negative links of `g`.

    Pairs that were positive links keep their original weight; pairs with no
    original link get `filler_weight` (the source graph never defines these
    weights, so the filler is an explicit, auditable parameter).
    """
    filler_weight = _check_weight(filler_weight, "filler weight")
    out = UnsignedGraph(g.node_ids)
    signed = dict(g.signed_edge_items())
    edges = {}
    n = g.n_nodes
    for i in range(n):
        for j in range(i + 1, n):
            w = signed.get((i, j))
            if w is None:
                edges[(i, j)] = filler_weight
            elif w > 0:
                edges[(i, j)] = w
    out._edges = edges
    return out


def _nodes_path(path: Path) -> Path:
    return path.with_name(path.stem + ".nodes" + path.suffix)


def _write_nodes(path: Path, node_ids) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["node_id"])
        for node_id in node_ids:
            writer.writerow([node_id])


def _read_nodes(path: Path) -> list[str] | None:
    if not path.exists():
        return None
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != ["node_id"]:
            raise DataError(f"{path}:1: expected header 'node_id'")
        return [row[0] for row in reader if row]


def write_signed_edgelist(g: SignedGraph, path) -> None:
    """Write `source,target,weight,sign` plus a companion node-list CSV.

    The companion file (<stem>.nodes<ext>) preserves isolated nodes and node
    order; weights are written with full round-trip precision.
    """
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["source", "target", "weight", "sign"])
        for u, v, w, s in g.links():
            writer.writerow([u, v, repr(w), s])
    _write_nodes(_nodes_path(path), g.node_ids)


def read_signed_edgelist(path) -> SignedGraph:
    path = Path(path)
    node_ids = _read_nodes(_nodes_path(path))
    links = []
    seen: list[str] = []
    seen_set = set()
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != ["source", "target", "weight", "sign"]:
            raise DataError(f"{path}:1: expected header 'source,target,weight,sign'")
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise DataError(f"{path}:{line_no}: expected 4 columns, got {len(row)}")
            u, v, weight_text, sign = [cell.strip() for cell in row]
            try:
                weight = float(weight_text)
            except ValueError:
                raise DataError(f"{path}:{line_no}: invalid weight {weight_text!r}") from None
            links.append((u, v, weight, sign))
            for node in (u, v):
                if node not in seen_set:
                    seen_set.add(node)
                    seen.append(node)
    if node_ids is None:
        node_ids = seen
    return SignedGraph(node_ids, links)


def write_unsigned_edgelist(g: UnsignedGraph, path) -> None:
    """Write `source,target,weight` plus the companion node-list CSV."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["source", "target", "weight"])
        for u, v, w in g.links():
            writer.writerow([u, v, repr(w)])
    _write_nodes(_nodes_path(path), g.node_ids)


def read_unsigned_edgelist(path) -> UnsignedGraph:
    path = Path(path)
    node_ids = _read_nodes(_nodes_path(path))
    links = []
    seen: list[str] = []
    seen_set = set()
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != ["source", "target", "weight"]:
            raise DataError(f"{path}:1: expected header 'source,target,weight'")
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise DataError(f"{path}:{line_no}: expected 3 columns, got {len(row)}")
            u, v, weight_text = [cell.strip() for cell in row]
            try:
                weight = float(weight_text)
            except ValueError:
                raise DataError(f"{path}:{line_no}: invalid weight {weight_text!r}") from None
            links.append((u, v, weight))
            for node in (u, v):
                if node not in seen_set:
                    seen_set.add(node)
                    seen.append(node)
    if node_ids is None:
        node_ids = seen
    return UnsignedGraph(node_ids, links)
