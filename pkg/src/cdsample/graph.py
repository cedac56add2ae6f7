"""Undirected simple graphs backed by numpy arrays, plus SNAP edge-list I/O."""

from __future__ import annotations

import io
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

logger = logging.getLogger(__name__)


class EdgeListParseError(ValueError):
    """Raised for a malformed data line in an edge-list file."""

    def __init__(self, lineno: int, line: str, reason: str):
        self.lineno = lineno
        self.line = line
        super().__init__(f"line {lineno}: {reason}: {line.rstrip()!r}")


@dataclass(frozen=True)
class LoadReport:
    raw_lines: int = 0
    raw_edges: int = 0
    self_loops: int = 0
    duplicates: int = 0
    nodes: int = 0
    edges: int = 0


def _normalize_pairs(pairs: np.ndarray) -> np.ndarray:
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    lo = np.minimum(pairs[:, 0], pairs[:, 1])
    hi = np.maximum(pairs[:, 0], pairs[:, 1])
    if len(lo) == 0:
        return np.empty((0, 2), dtype=np.int64)
    return np.unique(np.column_stack([lo, hi]), axis=0)


class Graph:
    """Immutable undirected simple graph on nodes ``0..node_count-1``.

    Edges are kept once as ``(u, v)`` with ``u < v``, lexicographically
    sorted. Adjacency is CSR (``indptr``/``indices``) with sorted neighbor
    lists.

    Use :meth:`from_edges` to build from arbitrary pairs; the constructor
    expects already-normalized edges.
    """

    __slots__ = ("node_count", "edges", "indptr", "indices", "degree", "_adj", "load_report")

    def __init__(self, node_count: int, edges: np.ndarray, load_report: LoadReport | None = None):
        node_count = int(node_count)
        if node_count < 0:
            raise ValueError("node_count must be nonnegative")
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if len(edges):
            if edges.min() < 0 or edges.max() >= node_count:
                raise ValueError("edge endpoint out of range")
            if np.any(edges[:, 0] >= edges[:, 1]):
                raise ValueError("edges must be stored as (u, v) with u < v")
            key = edges[:, 0] * node_count + edges[:, 1]
            if np.any(np.diff(key) <= 0):
                raise ValueError("edges must be sorted and unique")
        src = np.concatenate([edges[:, 0], edges[:, 1]])
        dst = np.concatenate([edges[:, 1], edges[:, 0]])
        order = np.lexsort((dst, src))
        indices = dst[order]
        degree = np.bincount(src, minlength=node_count).astype(np.int64)
        indptr = np.zeros(node_count + 1, dtype=np.int64)
        np.cumsum(degree, out=indptr[1:])
        # handshake
        assert degree.sum() == 2 * len(edges)
        for arr in (edges, indices, indptr, degree):
            arr.flags.writeable = False
        self.node_count = node_count
        self.edges = edges
        self.indptr = indptr
        self.indices = indices
        self.degree = degree
        self._adj = None
        self.load_report = load_report

    @classmethod
    def from_edges(cls, node_count: int, pairs) -> "Graph":
        """Build a graph from arbitrary pairs: symmetrize, dedupe, drop self-loops."""
        return cls(node_count, _normalize_pairs(np.asarray(pairs, dtype=np.int64)))

    @classmethod
    def empty(cls, node_count: int = 0) -> "Graph":
        return cls(node_count, np.empty((0, 2), dtype=np.int64))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < len(nb) and nb[i] == v)

    def adjacency_matrix(self) -> sp.csr_matrix:
        """Symmetric 0/1 adjacency as a float64 CSR matrix (cached)."""
        if self._adj is None:
            n = self.node_count
            data = np.ones(len(self.indices), dtype=np.float64)
            self._adj = sp.csr_matrix((data, self.indices, self.indptr), shape=(n, n))
        return self._adj

    def edge_keys(self) -> np.ndarray:
        """Scalar key ``u * n + v`` per stored edge, sorted ascending."""
        return self.edges[:, 0] * self.node_count + self.edges[:, 1]

    def edge_ids(self, pairs: np.ndarray) -> np.ndarray:
        """Positions in :attr:`edges` of the given normalized pairs (-1 if absent)."""
        pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        keys = pairs[:, 0] * self.node_count + pairs[:, 1]
        all_keys = self.edge_keys()
        pos = np.searchsorted(all_keys, keys)
        pos = np.minimum(pos, max(len(all_keys) - 1, 0))
        found = len(all_keys) > 0
        ok = (all_keys[pos] == keys) if found else np.zeros(len(keys), dtype=bool)
        return np.where(ok, pos, -1)

    def __repr__(self) -> str:
        return f"Graph(nodes={self.node_count}, edges={self.n_edges})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.node_count == other.node_count and np.array_equal(self.edges, other.edges)

    def __hash__(self):
        return hash((self.node_count, self.edges.tobytes()))

    def __getstate__(self):
        return {"node_count": self.node_count, "edges": np.array(self.edges), "load_report": self.load_report}

    def __setstate__(self, state):
        self.__init__(state["node_count"], state["edges"], state["load_report"])


@dataclass
class NodeIdMap:
    """Bijection between external node ids and dense internal indices."""

    external: list = field(default_factory=list)
    index: dict = field(default_factory=dict)

    def add(self, ext) -> int:
        i = self.index.get(ext)
        if i is None:
            i = len(self.external)
            self.index[ext] = i
            self.external.append(ext)
        return i

    def to_internal(self, ext) -> int:
        return self.index[ext]

    def to_external(self, i: int):
        return self.external[i]

    def __len__(self) -> int:
        return len(self.external)

    @classmethod
    def identity(cls, n: int) -> "NodeIdMap":
        return cls(list(range(n)), {i: i for i in range(n)})


def _parse_int(tok: str, lineno: int, line: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise EdgeListParseError(lineno, line, f"non-integer token {tok!r}") from None


def load_edge_list(source) -> tuple[Graph, NodeIdMap]:
    """Read a SNAP-style edge list.

    ``source`` is a text stream, a path, or a string of file contents
    wrapped in :class:`io.StringIO`. Lines starting with ``#`` are
    comments, except ``# isolated: ...`` which lists nodes without edges
    (written by :func:`write_edge_list`). Directed arcs are symmetrized,
    duplicates and self-loops dropped. Node indices follow first-seen
    order.
    """
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source) as fh:
            return load_edge_list(fh)

    ids = NodeIdMap()
    src: list[int] = []
    dst: list[int] = []
    raw_lines = 0
    for lineno, line in enumerate(source, start=1):
        raw_lines += 1
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            body = s[1:].strip()
            if body.startswith("isolated:"):
                for tok in body[len("isolated:"):].split():
                    ids.add(_parse_int(tok, lineno, line))
            continue
        toks = s.split()
        if len(toks) != 2:
            raise EdgeListParseError(lineno, line, f"expected 2 tokens, got {len(toks)}")
        u = _parse_int(toks[0], lineno, line)
        v = _parse_int(toks[1], lineno, line)
        src.append(ids.add(u))
        dst.append(ids.add(v))

    pairs = np.column_stack([np.asarray(src, dtype=np.int64), np.asarray(dst, dtype=np.int64)])
    self_loops = int(np.sum(pairs[:, 0] == pairs[:, 1])) if len(pairs) else 0
    edges = _normalize_pairs(pairs)
    report = LoadReport(
        raw_lines=raw_lines,
        raw_edges=len(pairs),
        self_loops=self_loops,
        duplicates=len(pairs) - self_loops - len(edges),
        nodes=len(ids),
        edges=len(edges),
    )
    logger.info("loaded edge list: %s", report)
    return Graph(len(ids), edges, load_report=report), ids


def write_edge_list(g: Graph, stream, ids: NodeIdMap | None = None, header: list[str] | None = None,
                    nodes=None, edges=None) -> None:
    """Write ``# nodes: N edges: M`` then sorted edge pairs.

    By default writes all of ``g``; pass ``nodes``/``edges`` (internal
    indices) to write a subset. Nodes without any written edge are listed
    on a ``# isolated:`` line so a reload restores them.
    """
    if nodes is None:
        nodes = np.arange(g.node_count)
    if edges is None:
        edges = g.edges
    nodes = np.asarray(nodes, dtype=np.int64)
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    for line in header or ():
        stream.write(f"# {line}\n")
    stream.write(f"# nodes: {len(nodes)} edges: {len(edges)}\n")
    covered = np.zeros(g.node_count, dtype=bool)
    covered[edges.ravel()] = True
    isolated = nodes[~covered[nodes]]
    ext = (lambda i: i) if ids is None else ids.to_external
    if len(isolated):
        stream.write("# isolated: " + " ".join(str(ext(int(v))) for v in np.sort(isolated)) + "\n")
    if ids is None:
        out = edges
    else:
        out = np.array([[ext(int(u)), ext(int(v))] for u, v in edges], dtype=np.int64).reshape(-1, 2)
        out = np.column_stack([out.min(axis=1), out.max(axis=1)]) if len(out) else out
    if len(out):
        out = out[np.lexsort((out[:, 1], out[:, 0]))]
    buf = io.StringIO()
    np.savetxt(buf, out, fmt="%d", delimiter="\t")
    stream.write(buf.getvalue())


def induced_edge_mask(g: Graph, nodes) -> np.ndarray:
    """Boolean mask over ``g.edges`` selecting edges with both endpoints in ``nodes``."""
    nodes = np.asarray(nodes, dtype=np.int64)
    if len(nodes) and (nodes.min() < 0 or nodes.max() >= g.node_count):
        raise ValueError("node index out of range")
    member = np.zeros(g.node_count, dtype=bool)
    member[nodes] = True
    return member[g.edges[:, 0]] & member[g.edges[:, 1]]


def induced_edges(g: Graph, nodes) -> np.ndarray:
    """Edges of ``g`` (parent indices) with both endpoints in ``nodes``."""
    return g.edges[induced_edge_mask(g, nodes)]


def relabel(nodes, edges) -> tuple[np.ndarray, np.ndarray]:
    """Map parent-index ``edges`` onto positions in sorted ``nodes``."""
    nodes = np.unique(np.asarray(nodes, dtype=np.int64))
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    return nodes, np.searchsorted(nodes, edges)


def induced_subgraph(g: Graph, nodes) -> Graph:
    """Subgraph on ``nodes`` with every connecting edge, reindexed by sorted node order."""
    nodes = np.unique(np.asarray(nodes, dtype=np.int64))
    sub_nodes, local = relabel(nodes, induced_edges(g, nodes))
    return Graph(len(sub_nodes), local)


def degree_sequence(g: Graph) -> np.ndarray:
    return np.array(g.degree)


def connected_components(g: Graph) -> tuple[int, np.ndarray]:
    from scipy.sparse.csgraph import connected_components as cc
    return cc(g.adjacency_matrix(), directed=False)
