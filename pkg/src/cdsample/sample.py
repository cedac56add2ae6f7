"""Sampler parameters and the sample-graph container shared by every sampler."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .graph import Graph, NodeIdMap, induced_edges, relabel, write_edge_list


@dataclass(frozen=True)
class SamplerParams:
    fraction: float = 0.1
    restart_probability: float = 0.15
    forward_burning_probability: float = 0.3
    pagerank_damping: float = 0.85
    induced: bool = False
    rng_seed: int = 0

    def __post_init__(self):
        if not 0 < self.fraction <= 1:
            raise ValueError(f"fraction must be in (0, 1], got {self.fraction}")
        if not 0 <= self.restart_probability < 1:
            raise ValueError("restart_probability must be in [0, 1)")
        if not 0 < self.forward_burning_probability < 1:
            raise ValueError("forward_burning_probability must be in (0, 1)")
        if not 0 < self.pagerank_damping < 1:
            raise ValueError("pagerank_damping must be in (0, 1)")

    def replace(self, **kw) -> "SamplerParams":
        d = asdict(self)
        d.update(kw)
        return SamplerParams(**d)


def _normalize_edges(edges) -> np.ndarray:
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if len(e) == 0:
        return np.empty((0, 2), dtype=np.int64)
    e = np.column_stack([e.min(axis=1), e.max(axis=1)])
    return np.unique(e, axis=0)


@dataclass
class SampleGraph:
    """Selected nodes and edges of a parent graph, in parent indices.

    ``nodes`` is sorted; ``edges`` are ``(u, v)`` pairs with ``u < v`` in
    lexicographic order. ``meta`` holds sampler diagnostics (re-seeds,
    shortfalls, fallbacks).
    """

    parent: Graph
    nodes: np.ndarray
    edges: np.ndarray
    method: str
    params: SamplerParams | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.nodes = np.unique(np.asarray(self.nodes, dtype=np.int64))
        self.edges = _normalize_edges(self.edges)

    @classmethod
    def induced(cls, parent: Graph, nodes, method: str, params=None, meta=None) -> "SampleGraph":
        nodes = np.unique(np.asarray(nodes, dtype=np.int64))
        return cls(parent, nodes, induced_edges(parent, nodes), method, params, meta or {})

    @classmethod
    def from_edges(cls, parent: Graph, edges, method: str, params=None, meta=None, extra_nodes=()) -> "SampleGraph":
        edges = _normalize_edges(edges)
        nodes = np.union1d(edges.ravel(), np.asarray(extra_nodes, dtype=np.int64))
        return cls(parent, nodes, edges, method, params, meta or {})

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def to_graph(self) -> Graph:
        """The sample as a standalone graph, nodes reindexed by sorted parent index."""
        nodes, local = relabel(self.nodes, self.edges)
        return Graph(len(nodes), local)

    def validate(self) -> None:
        """Raise ``AssertionError`` if any edge is missing from the parent or has an unselected endpoint."""
        if self.n_edges:
            assert np.all(np.isin(self.edges.ravel(), self.nodes)), "edge endpoint not selected"
            assert np.all(self.parent.edge_ids(self.edges) >= 0), "edge not in parent graph"
        assert self.n_nodes == 0 or (self.nodes[0] >= 0 and self.nodes[-1] < self.parent.node_count)

    def write(self, stream, ids: NodeIdMap | None = None) -> None:
        """Edge-list format with a ``# method=... seed=... fraction=...`` header."""
        seed = self.params.rng_seed if self.params is not None else ""
        fraction = self.params.fraction if self.params is not None else ""
        header = [f"method={self.method} seed={seed} fraction={fraction}"]
        write_edge_list(self.parent, stream, ids=ids, header=header, nodes=self.nodes, edges=self.edges)
