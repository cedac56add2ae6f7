"""Densification exponents and per-community sample budgets.

The densification power law relates a graph's edge count to its node count
as ``e ~ n ** alpha``. Given a (sub)graph with ``n`` nodes and ``e`` edges
the two-point exponent is ``alpha = ln(e) / ln(n)``, and a sample of ``k``
nodes drawn from it should carry about ``k ** alpha`` edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .community import Dendrogram


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class AlphaRecord:
    n: int
    e: int
    alpha: float | None  # None when n < 2 or e < 1

    @property
    def defined(self) -> bool:
        return self.alpha is not None


def densification_exponent(n: int, e: int) -> float | None:
    """``ln(e) / ln(n)``, or ``None`` when ``n < 2`` or ``e < 1``."""
    if n < 2 or e < 1:
        return None
    return math.log(e) / math.log(n)


def alpha_record(n: int, e: int) -> AlphaRecord:
    return AlphaRecord(int(n), int(e), densification_exponent(n, e))


def dpl_edge_target(node_budget: int, alpha: float, d_alpha: float = 0.0) -> int:
    """Edge count for a sample of ``node_budget`` nodes at exponent ``alpha + d_alpha``.

    Rounded half-up and clamped to the complete-graph bound.
    """
    if node_budget < 0:
        raise ValueError("node_budget must be nonnegative")
    if node_budget <= 1:
        return 0
    target = round_half_up(node_budget ** (alpha + d_alpha))
    return min(max(target, 0), node_budget * (node_budget - 1) // 2)


def apportion(total: int, sizes) -> np.ndarray:
    """Split ``total`` over ``sizes`` proportionally by the largest-remainder method.

    Remainder ties go to the lower index. Exact integer arithmetic.
    """
    sizes = [int(s) for s in sizes]
    whole = sum(sizes)
    if whole == 0:
        if total:
            raise ValueError("cannot apportion a positive total over zero sizes")
        return np.zeros(len(sizes), dtype=np.int64)
    base = [total * s // whole for s in sizes]
    rem = [total * s % whole for s in sizes]
    left = total - sum(base)
    for i in sorted(range(len(sizes)), key=lambda i: (-rem[i], i))[:left]:
        base[i] += 1
    return np.array(base, dtype=np.int64)


@dataclass
class BudgetTree:
    """Budgets aligned with a :class:`Dendrogram` (same node ids)."""

    dendrogram: Dendrogram
    node_budget: np.ndarray
    edge_budget: np.ndarray
    inter_edge_budget: np.ndarray  # zero for leaves
    alphas: list
    fraction: float
    d_alpha: float

    @property
    def total_nodes(self) -> int:
        return int(self.node_budget[-1])

    def write(self, stream) -> None:
        """Dendrogram text format with ``(node_budget, edge_budget, inter_edge_budget, alpha)`` appended."""
        for node in self.dendrogram.nodes:
            i = node.id
            a = self.alphas[i].alpha
            tail = (f"({self.node_budget[i]}, {self.edge_budget[i]}, {self.inter_edge_budget[i]}, "
                    f"{'nan' if a is None else repr(round(a, 12))})")
            if node.is_leaf:
                stream.write(f"leaf {i} {node.n_nodes} {node.n_edges} {tail} : "
                             + " ".join(map(str, node.nodes.tolist())) + "\n")
            else:
                stream.write(f"merge {i} {node.left} {node.right} {node.order} {tail}\n")


def allocate_budgets(dend: Dendrogram, fraction: float, d_alpha: float = 0.0) -> BudgetTree:
    """Turn a sample fraction into node, edge and inter-community edge budgets.

    The total node budget ``round(fraction * n)`` is apportioned over the
    leaves by community size; internal nodes sum their children. Every
    dendrogram node gets an edge budget from its own exponent, and each
    internal node's inter-community budget is what its edge budget leaves
    over after its two children.
    """
    if not 0 < fraction <= 1:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    nodes = dend.nodes
    k = len(nodes)
    total = round_half_up(fraction * dend.root.n_nodes)
    node_budget = np.zeros(k, dtype=np.int64)
    node_budget[: dend.n_leaves] = apportion(total, [nd.n_nodes for nd in dend.leaves])
    for nd in dend.internal:
        node_budget[nd.id] = node_budget[nd.left] + node_budget[nd.right]

    edge_budget = np.zeros(k, dtype=np.int64)
    alphas = []
    for nd in nodes:
        rec = alpha_record(nd.n_nodes, nd.n_edges)
        alphas.append(rec)
        if rec.defined:
            edge_budget[nd.id] = dpl_edge_target(int(node_budget[nd.id]), rec.alpha, d_alpha)

    inter = np.zeros(k, dtype=np.int64)
    for nd in dend.internal:
        inter[nd.id] = max(0, edge_budget[nd.id] - edge_budget[nd.left] - edge_budget[nd.right])
    return BudgetTree(dend, node_budget, edge_budget, inter, alphas, float(fraction), float(d_alpha))
