"""Greedy agglomerative modularity (CNM) and the community dendrogram.

Modularity is tracked as an exact integer numerator: for ``m`` edges,
``Q = (4 m * sum(L_c) - sum(d_c ** 2)) / (4 m ** 2)`` where ``L_c`` is the
number of intra-community edges and ``d_c`` the total degree of community
``c``. Merging communities ``i`` and ``j`` joined by ``w`` edges changes the
numerator by ``4 m w - 2 d_i d_j``, so merge ties are detected exactly.
"""

from __future__ import annotations

import heapq
import io
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph


@dataclass(frozen=True)
class Partition:
    """Disjoint covering of a graph's nodes.

    ``labels[v]`` indexes into ``communities``; communities are ordered by
    their smallest node index.
    """

    labels: np.ndarray
    communities: tuple

    @classmethod
    def from_labels(cls, labels) -> "Partition":
        labels = np.asarray(labels, dtype=np.int64)
        groups: dict[int, list[int]] = {}
        for v, c in enumerate(labels.tolist()):
            groups.setdefault(c, []).append(v)
        comms = sorted((np.array(vs, dtype=np.int64) for vs in groups.values()), key=lambda a: a[0])
        relabeled = np.empty(len(labels), dtype=np.int64)
        for i, c in enumerate(comms):
            relabeled[c] = i
        return cls(relabeled, tuple(comms))

    @classmethod
    def from_communities(cls, communities, n: int) -> "Partition":
        labels = np.full(n, -1, dtype=np.int64)
        for i, c in enumerate(communities):
            c = np.asarray(list(c), dtype=np.int64)
            if np.any(labels[c] >= 0):
                raise ValueError("communities overlap")
            labels[c] = i
        if np.any(labels < 0):
            raise ValueError("communities do not cover every node")
        return cls.from_labels(labels)

    def __len__(self) -> int:
        return len(self.communities)


def modularity(g: Graph, p: Partition) -> float:
    """Newman modularity of partition ``p``; raises ``ValueError`` on an edgeless graph."""
    m = g.n_edges
    if m == 0:
        raise ValueError("modularity is undefined for a graph without edges")
    return modularity_numerator(g, p) / (4 * m * m)


def modularity_numerator(g: Graph, p: Partition) -> int:
    m = g.n_edges
    lab = p.labels
    k = len(p.communities)
    intra = int(np.sum(lab[g.edges[:, 0]] == lab[g.edges[:, 1]]))
    d = np.bincount(lab, weights=g.degree, minlength=k).astype(np.int64)
    return 4 * m * intra - int(sum(int(x) * int(x) for x in d))


@dataclass
class DendrogramNode:
    id: int
    nodes: np.ndarray
    n_edges: int
    left: int = -1
    right: int = -1
    order: int = -1  # merge order for internal nodes, -1 for leaves
    parent: int = -1

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def is_leaf(self) -> bool:
        return self.left < 0


@dataclass
class Dendrogram:
    """Binary merge tree over communities.

    Leaves come first (ids ``0..n_leaves-1``, in partition order), then
    internal nodes in merge order; the last node is the root.
    """

    nodes: list = field(default_factory=list)
    n_leaves: int = 0

    @property
    def root(self) -> DendrogramNode:
        return self.nodes[-1]

    @property
    def leaves(self) -> list:
        return self.nodes[: self.n_leaves]

    @property
    def internal(self) -> list:
        return self.nodes[self.n_leaves:]

    def __len__(self) -> int:
        return len(self.nodes)

    def __getitem__(self, i) -> DendrogramNode:
        return self.nodes[i]

    def lca(self, a: int, b: int) -> int:
        """Lowest common ancestor of dendrogram nodes ``a`` and ``b``."""
        seen = set()
        x = a
        while x >= 0:
            seen.add(x)
            x = self.nodes[x].parent
        x = b
        while x not in seen:
            x = self.nodes[x].parent
        return x

    @classmethod
    def single(cls, g: Graph) -> "Dendrogram":
        """One-leaf dendrogram covering the whole graph."""
        return cls([DendrogramNode(0, np.arange(g.node_count), g.n_edges)], 1)

    @classmethod
    def build(cls, g: Graph, communities, merges) -> "Dendrogram":
        """Assemble from leaf node sets and ``(left, right)`` merges in order.

        Edge counts are recomputed from ``g``.
        """
        label = np.full(g.node_count, -1, dtype=np.int64)
        nodes = []
        for i, c in enumerate(communities):
            c = np.sort(np.asarray(c, dtype=np.int64))
            label[c] = i
            nodes.append(DendrogramNode(i, c, 0))
        lu, lv = label[g.edges[:, 0]], label[g.edges[:, 1]]
        intra = lu[lu == lv]
        for i, cnt in enumerate(np.bincount(intra, minlength=len(nodes))):
            nodes[i].n_edges = int(cnt)
        n_leaves = len(nodes)
        # inter-leaf edge counts keyed by leaf pair
        cross = {}
        for a, b in zip(lu[lu != lv].tolist(), lv[lu != lv].tolist()):
            key = (a, b) if a < b else (b, a)
            cross[key] = cross.get(key, 0) + 1
        leafsets = {i: {i} for i in range(n_leaves)}
        for order, (l, r) in enumerate(merges):
            new = len(nodes)
            between = sum(cnt for (a, b), cnt in cross.items()
                          if (a in leafsets[l] and b in leafsets[r]) or (a in leafsets[r] and b in leafsets[l]))
            node = DendrogramNode(new, np.sort(np.concatenate([nodes[l].nodes, nodes[r].nodes])),
                                  nodes[l].n_edges + nodes[r].n_edges + between, l, r, order)
            nodes[l].parent = new
            nodes[r].parent = new
            leafsets[new] = leafsets[l] | leafsets[r]
            nodes.append(node)
        return cls(nodes, n_leaves)


class _MergeHeap:
    """Max-heap of candidate merges keyed by (numerator gain, smallest pair), with lazy deletion."""

    def __init__(self):
        self.heap: list = []

    def push(self, gain: int, i: int, j: int) -> None:
        heapq.heappush(self.heap, (-gain, i, j))

    def rebuild(self, adj: dict, gain_fn) -> None:
        entries = []
        for i, nbrs in adj.items():
            for j in nbrs:
                if i < j:
                    entries.append((-gain_fn(i, j), i, j))
        heapq.heapify(entries)
        self.heap = entries

    def pop_best(self, adj: dict, gain_fn):
        while self.heap:
            neg, i, j = self.heap[0]
            nbrs = adj.get(i)
            if nbrs is not None and j in nbrs and gain_fn(i, j) == -neg:
                return -neg, i, j
            heapq.heappop(self.heap)
        return None


def greedy_merge_sequence(g: Graph):
    """Run CNM to completion.

    Returns ``(merges, best_step)`` where ``merges`` is a list of
    ``(a, b, gain)`` label pairs (``a < b``; the merged community keeps
    label ``a``) starting from singletons labelled by node index, and
    ``best_step`` is the number of leading merges that reach the maximum
    modularity (earliest if tied).

    While positive gains exist the adjacent pair with the largest gain is
    merged, ties to the smallest label pair. After that, merges are forced:
    adjacent pairs first (largest gain), then, once no two communities
    share an edge, the two communities of smallest total degree.
    """
    n = g.node_count
    m = g.n_edges
    deg = {v: int(d) for v, d in enumerate(g.degree.tolist())}
    adj: dict[int, dict[int, int]] = {v: {} for v in range(n)}
    for u, v in g.edges.tolist():
        adj[u][v] = 1
        adj[v][u] = 1

    def gain(i, j):
        return 4 * m * adj[i][j] - 2 * deg[i] * deg[j]

    heap = _MergeHeap()
    heap.rebuild(adj, gain)
    live_pairs = m
    merges = []
    best_step = None

    while len(adj) > 1:
        top = heap.pop_best(adj, gain)
        if top is None:
            break
        gval, a, b = top
        if gval <= 0 and best_step is None:
            best_step = len(merges)
        heapq.heappop(heap.heap)
        merges.append((a, b, gval))
        na, nb = adj.pop(a), adj.pop(b)
        na.pop(b, None)
        nb.pop(a, None)
        if len(na) < len(nb):
            na, nb = nb, na
        for c, w in nb.items():
            na[c] = na.get(c, 0) + w
        live_pairs -= 1
        for c, w in na.items():
            other = adj[c]
            had_a = other.pop(a, None) is not None
            had_b = other.pop(b, None) is not None
            live_pairs -= int(had_a) + int(had_b) - 1
            other[a] = w
        adj[a] = na
        deg[a] = deg[a] + deg.pop(b)
        for c in na:
            x, y = (a, c) if a < c else (c, a)
            heap.push(gain(x, y), x, y)
        if len(heap.heap) > 4 * live_pairs + 1024:
            heap.rebuild(adj, gain)

    if best_step is None:
        best_step = len(merges)

    # no adjacent pairs left: join smallest total degree first
    rest = [(deg[c], c) for c in adj]
    heapq.heapify(rest)
    while len(rest) > 1:
        da, a = heapq.heappop(rest)
        db, b = heapq.heappop(rest)
        if a > b:
            a, b = b, a
        merges.append((a, b, -2 * da * db))
        deg[a] = da + db
        heapq.heappush(rest, (deg[a], a))
    return merges, best_step


def extract_hierarchy(g: Graph) -> tuple[Partition, Dendrogram]:
    """Partition at the modularity maximum of the CNM merge sequence, plus the merge tree above it.

    The merges after the maximum are continued (possibly with negative
    gain) until a single root remains, so disconnected graphs still get a
    rooted dendrogram.
    """
    n = g.node_count
    if n == 0:
        raise ValueError("cannot extract communities from an empty graph")
    merges, best = greedy_merge_sequence(g)

    # union-find over node labels to recover the partition at the cut
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b, _ in merges[:best]:
        parent[find(b)] = find(a)
    labels = np.array([find(v) for v in range(n)], dtype=np.int64)
    part = Partition.from_labels(labels)

    # leaf id of each surviving label, then replay the forced merges
    current = {}
    for i, c in enumerate(part.communities):
        current[find(int(c[0]))] = i
    dnodes = []
    lab = part.labels
    lu, lv = lab[g.edges[:, 0]], lab[g.edges[:, 1]]
    intra = np.bincount(lu[lu == lv], minlength=len(part))
    for i, c in enumerate(part.communities):
        dnodes.append(DendrogramNode(i, c, int(intra[i])))

    # edge counts between current dendrogram nodes, keyed by (min, max) id
    cross: dict[int, dict[int, int]] = {i: {} for i in range(len(part))}
    for a, b in zip(lu[lu != lv].tolist(), lv[lu != lv].tolist()):
        cross[a][b] = cross[a].get(b, 0) + 1
        cross[b][a] = cross[b].get(a, 0) + 1

    for order, (a, b, _) in enumerate(merges[best:]):
        ra, rb = find(a), find(b)
        left, right = current.pop(ra), current.pop(rb)
        new = len(dnodes)
        between = cross[left].get(right, 0)
        dn = DendrogramNode(new, np.sort(np.concatenate([dnodes[left].nodes, dnodes[right].nodes])),
                            dnodes[left].n_edges + dnodes[right].n_edges + between, left, right, order)
        dnodes[left].parent = new
        dnodes[right].parent = new
        dnodes.append(dn)
        merged: dict[int, int] = {}
        for side in (left, right):
            for c, w in cross.pop(side).items():
                if c in (left, right):
                    continue
                merged[c] = merged.get(c, 0) + w
                cross[c].pop(side)
        for c, w in merged.items():
            cross[c][new] = w
        cross[new] = merged
        parent[rb] = ra
        current[ra] = new
    return part, Dendrogram(dnodes, len(part))


def write_dendrogram(d: Dendrogram, stream) -> None:
    """One line per node: ``leaf <id> <n> <e> : <nodes>`` or ``merge <id> <left> <right> <order>``."""
    for node in d.nodes:
        if node.is_leaf:
            stream.write(f"leaf {node.id} {node.n_nodes} {node.n_edges} : "
                         + " ".join(map(str, node.nodes.tolist())) + "\n")
        else:
            stream.write(f"merge {node.id} {node.left} {node.right} {node.order}\n")


def read_dendrogram(stream, g: Graph) -> Dendrogram:
    """Inverse of :func:`write_dendrogram`; edge counts are recomputed from ``g``."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    leaves, merges = [], []
    for line in stream:
        toks = line.split()
        if not toks:
            continue
        if toks[0] == "leaf":
            colon = toks.index(":")
            leaves.append([int(t) for t in toks[colon + 1:]])
        elif toks[0] == "merge":
            merges.append((int(toks[2]), int(toks[3])))
        else:
            raise ValueError(f"unrecognized dendrogram line: {line.rstrip()!r}")
    return Dendrogram.build(g, leaves, merges)
