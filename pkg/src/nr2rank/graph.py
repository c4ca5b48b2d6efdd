"""Weighted graphs, edge-list I/O, row normalization and synthetic generators."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping

import numpy as np
import scipy.sparse as sp

from .errors import ParameterError, ParseError, ValidationError

ABSORBING_ID = "__absorbing__"

Attributes = dict[int, dict[str, frozenset[str]]]


@dataclass(frozen=True, eq=False)
class Graph:
    """Directed weighted graph on nodes 0..n-1.

    ``weights[u, v]`` is sim(u, v). Undirected graphs simply store both
    directions. ``attributes[node][name]`` is the set of label values a node
    carries for attribute ``name``.
    """

    weights: sp.csr_matrix
    node_ids: tuple[str, ...]
    attributes: Attributes = field(default_factory=dict)
    absorbing: int | None = None

    def __post_init__(self):
        w = self.weights
        if w.shape != (len(self.node_ids), len(self.node_ids)):
            raise ValidationError(f"weight matrix shape {w.shape} does not match {len(self.node_ids)} node ids")
        if len(set(self.node_ids)) != len(self.node_ids):
            raise ValidationError("node ids must be unique")
        if w.nnz and w.data.min() < 0:
            raise ValidationError("edge weights must be nonnegative")
        if self.absorbing is not None:
            d = self.absorbing
            row = w.getrow(d)
            col = w.getcol(d)
            if row.nnz != 1 or row.indices[0] != d or col.nnz != 1:
                raise ValidationError("absorbing node must carry exactly one edge, its self edge")

    @property
    def n(self) -> int:
        return len(self.node_ids)

    @property
    def num_edges(self) -> int:
        return int(self.weights.count_nonzero())

    def index(self, node_id: str) -> int:
        try:
            return self._index[node_id]
        except KeyError:
            raise ValidationError(f"unknown node {node_id!r}") from None

    @property
    def _index(self) -> dict[str, int]:
        # cached lazily; frozen dataclass so go through object.__setattr__
        cache = self.__dict__.get("_index_cache")
        if cache is None:
            cache = {nid: i for i, nid in enumerate(self.node_ids)}
            object.__setattr__(self, "_index_cache", cache)
        return cache

    def edges(self) -> Iterator[tuple[int, int, float]]:
        coo = self.weights.tocoo()
        order = np.lexsort((coo.col, coo.row))
        for i in order:
            if coo.data[i] != 0:
                yield int(coo.row[i]), int(coo.col[i]), float(coo.data[i])

    def attribute_names(self) -> set[str]:
        return {name for attrs in self.attributes.values() for name in attrs}

    def regular_nodes(self) -> np.ndarray:
        """Indices of all nodes other than the absorbing one."""
        idx = np.arange(self.n)
        if self.absorbing is None:
            return idx
        return idx[idx != self.absorbing]


def from_edges(
    edges: Iterable[tuple[str, str, float]],
    node_ids: Iterable[str] = (),
    attributes: Mapping[str, Mapping[str, Iterable[str]]] | None = None,
    directed: bool = False,
) -> Graph:
    """Build a graph from (src, dst, weight) triples keyed by string ids.

    Nodes are numbered by first appearance, starting with ``node_ids``.
    Repeated pairs accumulate; undirected input adds each weight in both
    directions (a self edge only once).
    """
    index: dict[str, int] = {}
    for nid in node_ids:
        index.setdefault(nid, len(index))
    acc: dict[tuple[int, int], float] = defaultdict(float)
    for src, dst, w in edges:
        if w < 0:
            raise ValidationError(f"negative weight {w} on edge ({src}, {dst})")
        u = index.setdefault(src, len(index))
        v = index.setdefault(dst, len(index))
        acc[u, v] += w
        if not directed and u != v:
            acc[v, u] += w
    n = len(index)
    weights = _csr_from_dict(acc, n)
    attrs: Attributes = {}
    for nid, named in (attributes or {}).items():
        if nid not in index:
            raise ValidationError(f"attribute references unknown node {nid!r}")
        attrs[index[nid]] = {name: frozenset(vals) for name, vals in named.items()}
    return Graph(weights, tuple(index), attrs)


def _csr_from_dict(acc: Mapping[tuple[int, int], float], n: int) -> sp.csr_matrix:
    if acc:
        keys = np.array(list(acc.keys()), dtype=np.int64)
        vals = np.fromiter(acc.values(), dtype=float, count=len(acc))
        m = sp.csr_matrix((vals, (keys[:, 0], keys[:, 1])), shape=(n, n))
    else:
        m = sp.csr_matrix((n, n))
    m.sort_indices()
    return m


def _data_lines(path: Path) -> Iterator[tuple[int, list[str]]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            yield lineno, line.split("\t")


def load_edge_list(path, attrs_path=None, directed: bool = False) -> Graph:
    """Read a ``src<TAB>dst<TAB>weight`` edge list and optional attribute TSV."""
    path = Path(path)
    triples = []
    for lineno, parts in _data_lines(path):
        if len(parts) != 3:
            raise ParseError(path, lineno, f"expected 3 tab-separated fields, got {len(parts)}")
        src, dst, raw = (p.strip() for p in parts)
        if not src or not dst:
            raise ParseError(path, lineno, "empty node id")
        try:
            w = float(raw)
        except ValueError:
            raise ParseError(path, lineno, f"bad weight {raw!r}") from None
        if not np.isfinite(w):
            raise ParseError(path, lineno, f"non-finite weight {raw!r}")
        if w < 0:
            raise ValidationError(f"{path}:{lineno}: negative weight {w}")
        triples.append((src, dst, w))

    attributes: dict[str, dict[str, set[str]]] = defaultdict(lambda: defaultdict(set))
    if attrs_path is not None:
        attrs_path = Path(attrs_path)
        for lineno, parts in _data_lines(attrs_path):
            if len(parts) != 3:
                raise ParseError(attrs_path, lineno, f"expected 3 tab-separated fields, got {len(parts)}")
            node, name, value = (p.strip() for p in parts)
            attributes[node][name].add(value)
    return from_edges(triples, attributes=attributes, directed=directed)


def write_edge_list(g: Graph, path, undirected: bool = True) -> None:
    """Write ``g`` in the edge-list format; undirected output lists each pair once.

    Self edges go first so that reloading numbers nodes in the same order.
    """
    edges = list(g.edges())
    loops = [e for e in edges if e[0] == e[1]]
    rest = [e for e in edges if e[0] != e[1] and not (undirected and e[0] > e[1])]
    with open(path, "w", encoding="utf-8") as fh:
        for u, v, w in loops + rest:
            fh.write(f"{g.node_ids[u]}\t{g.node_ids[v]}\t{w!r}\n")


def write_attributes(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for node in sorted(g.attributes):
            for name in sorted(g.attributes[node]):
                for value in sorted(g.attributes[node][name]):
                    fh.write(f"{g.node_ids[node]}\t{name}\t{value}\n")


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """Row-stochastic sparse matrix W."""

    matrix: sp.csr_matrix

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def row_normalize(g: Graph) -> TransitionMatrix:
    """W(i, j) = sim(i, j) / sum_z sim(i, z); dangling rows get a unit self edge first."""
    if g.n < 1:
        raise ValidationError("cannot normalize an empty graph")
    w = g.weights.tocsr().astype(float)
    out = np.asarray(w.sum(axis=1)).ravel()
    dangling = np.flatnonzero(out <= 0)
    if dangling.size:
        w = (w + sp.csr_matrix((np.ones(dangling.size), (dangling, dangling)), shape=w.shape)).tocsr()
        out[dangling] = 1.0
    m = (sp.diags(1.0 / out) @ w).tocsr()
    m.eliminate_zeros()
    m.sort_indices()
    return TransitionMatrix(m)


def augment_absorbing(g: Graph) -> Graph:
    """Append an absorbing node d = n whose only edge is a unit self edge."""
    if g.absorbing is not None:
        raise ValidationError("graph already has an absorbing node")
    n = g.n
    d = n
    w = sp.bmat([[g.weights, None], [None, sp.csr_matrix(([1.0], ([0], [0])), shape=(1, 1))]], format="csr")
    w.sort_indices()
    nid = ABSORBING_ID
    while nid in g._index:
        nid = "_" + nid
    return Graph(w, g.node_ids + (nid,), dict(g.attributes), absorbing=d)


def induced_subgraph(g: Graph, nodes: Iterable[int]) -> Graph:
    """Subgraph on ``nodes`` (indices), renumbered in ascending index order."""
    keep = sorted(set(int(v) for v in nodes))
    for v in keep:
        if not 0 <= v < g.n:
            raise ValidationError(f"unknown node index {v}")
    idx = np.array(keep, dtype=np.int64)
    w = g.weights[idx][:, idx].tocsr()
    w.sort_indices()
    remap = {old: new for new, old in enumerate(keep)}
    attrs = {remap[v]: a for v, a in g.attributes.items() if v in remap}
    absorbing = remap.get(g.absorbing) if g.absorbing is not None else None
    return Graph(w, tuple(g.node_ids[v] for v in keep), attrs, absorbing)


@dataclass(frozen=True)
class PlantedPartitionSpec:
    clusters: int
    size: int
    p_in: float
    p_out: float
    seed: int = 0

    def __post_init__(self):
        if self.clusters < 1 or self.size < 1:
            raise ParameterError("clusters and size must be >= 1")
        if not 0 <= self.p_out <= self.p_in <= 1:
            raise ParameterError(f"need 0 <= p_out <= p_in <= 1, got p_in={self.p_in}, p_out={self.p_out}")


def generate_planted_partition(spec: PlantedPartitionSpec) -> Graph:
    """Undirected planted-partition graph with unit weights and unit self edges.

    Node ``i`` belongs to cluster ``i // size`` and carries attribute
    ``cluster=<index>``. Block pairs are sampled in a fixed order from one
    seeded generator, so the output depends only on ``spec``.
    """
    rng = np.random.default_rng(spec.seed)
    c, s = spec.clusters, spec.size
    n = c * s
    rows, cols = [np.arange(n)], [np.arange(n)]
    for a in range(c):
        for b in range(a, c):
            p = spec.p_in if a == b else spec.p_out
            hit = rng.random((s, s)) < p
            if a == b:
                hit = np.triu(hit, k=1)
            i, j = np.nonzero(hit)
            rows += [a * s + i, b * s + j]
            cols += [b * s + j, a * s + i]
    r = np.concatenate(rows)
    q = np.concatenate(cols)
    w = sp.csr_matrix((np.ones(r.size), (r, q)), shape=(n, n))
    w.sort_indices()
    attrs = {v: {"cluster": frozenset({str(v // s)})} for v in range(n)}
    return Graph(w, tuple(str(v) for v in range(n)), attrs)


def cluster_labels(g: Graph, attribute: str = "cluster") -> np.ndarray:
    """Single-valued attribute as an integer label array (-1 where missing)."""
    labels = np.full(g.n, -1)
    values: dict[str, int] = {}
    for v, attrs in g.attributes.items():
        vals = attrs.get(attribute)
        if vals:
            labels[v] = values.setdefault(min(vals), len(values))
    return labels
