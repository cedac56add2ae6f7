"""Community + densification-power-law (C+D) sampling.

1. Extract communities and their merge dendrogram.
2. Size every community's sample: nodes by proportional share, edges by
   the community's own densification exponent.
3. Inside each leaf community, draw nodes by degree and then edges among
   them by endpoint degree sum.
4. Walk the dendrogram from the leaves up, and at every merge draw the
   inter-community edges between the two child samples by endpoint degree
   sum.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass

import numpy as np

from ._random import make_rng, weighted_sample
from .budget import BudgetTree, allocate_budgets
from .community import Dendrogram, Partition, extract_hierarchy
from .graph import Graph, induced_edges, induced_subgraph
from .sample import SampleGraph, SamplerParams

logger = logging.getLogger(__name__)

METHOD_TAG = "C+D"


@dataclass
class CommunitySample:
    leaf: int
    nodes: np.ndarray
    edges: np.ndarray
    node_shortfall: int = 0
    edge_shortfall: int = 0


@dataclass
class MergeRecord:
    node: int
    budget: int
    candidates: int
    selected: int

    @property
    def shortfall(self) -> int:
        return self.budget - self.selected


def sample_within_community(g: Graph, community, node_budget: int, edge_budget: int, rng_seed,
                            leaf: int = -1, weighting: str = "community") -> CommunitySample:
    """Degree-proportional node draw, then degree-sum-proportional edge draw, inside one community.

    ``weighting="community"`` uses degrees within the community's induced
    subgraph; ``"global"`` uses degrees in ``g``. If fewer candidate edges
    exist than ``edge_budget`` all of them are taken and the gap recorded.
    """
    rng = make_rng(rng_seed)
    community = np.unique(np.asarray(community, dtype=np.int64))
    node_short = 0
    if node_budget > len(community):
        node_short = node_budget - len(community)
        logger.info("leaf %d: node budget %d exceeds community size %d", leaf, node_budget, len(community))
        node_budget = len(community)
    sub = induced_subgraph(g, community)
    if weighting == "community":
        node_w = sub.degree
    elif weighting == "global":
        node_w = g.degree[community]
    else:
        raise ValueError(f"unknown weighting {weighting!r}")
    local = np.sort(weighted_sample(rng, node_w, node_budget))
    nodes = community[local]

    member = np.zeros(sub.node_count, dtype=bool)
    member[local] = True
    cand = sub.edges[member[sub.edges[:, 0]] & member[sub.edges[:, 1]]]
    take = min(edge_budget, len(cand))
    if take:
        w = node_w[cand[:, 0]] + node_w[cand[:, 1]]
        chosen = cand[weighted_sample(rng, w, take)]
    else:
        chosen = np.empty((0, 2), dtype=np.int64)
    edges = community[chosen].reshape(-1, 2)
    return CommunitySample(leaf, nodes, edges, node_short, max(0, edge_budget - take))


def merge_dendrogram(g: Graph, dend: Dendrogram, budgets: BudgetTree, leaf_samples, rng_seed):
    """Union the leaf samples, choosing inter-community edges at each merge.

    Merges are visited children-before-parents (ascending merge order). At
    each merge the candidates are parent edges joining a sampled node of the
    left subtree to a sampled node of the right subtree; up to the merge's
    inter-community budget are drawn by global endpoint degree sum.

    Returns ``(nodes, edges, merge_records)``.
    """
    rng = make_rng(rng_seed)
    if len(leaf_samples) != dend.n_leaves:
        raise ValueError("need exactly one community sample per leaf")
    leaf_of = np.full(g.node_count, -1, dtype=np.int64)
    parts_nodes, parts_edges = [], []
    for s in leaf_samples:
        leaf_of[s.nodes] = s.leaf
        parts_nodes.append(s.nodes)
        parts_edges.append(s.edges.reshape(-1, 2))
    nodes = np.concatenate(parts_nodes) if parts_nodes else np.empty(0, dtype=np.int64)

    # every parent edge between sampled nodes of different leaves becomes a
    # candidate at the merge joining those leaves
    cross = induced_edges(g, nodes)
    la, lb = leaf_of[cross[:, 0]], leaf_of[cross[:, 1]]
    cross = cross[la != lb]
    la, lb = la[la != lb], lb[la != lb]
    at_merge: dict[int, list[int]] = {}
    lca_cache: dict[tuple, int] = {}
    for i, (a, b) in enumerate(zip(la.tolist(), lb.tolist())):
        key = (a, b) if a < b else (b, a)
        node = lca_cache.get(key)
        if node is None:
            node = lca_cache[key] = dend.lca(a, b)
        at_merge.setdefault(node, []).append(i)

    deg = g.degree
    records = []
    for nd in sorted(dend.internal, key=lambda x: x.order):
        budget = int(budgets.inter_edge_budget[nd.id])
        idx = np.asarray(at_merge.get(nd.id, []), dtype=np.int64)
        take = min(budget, len(idx))
        if take:
            c = cross[idx]
            picked = c[weighted_sample(rng, deg[c[:, 0]] + deg[c[:, 1]], take)]
            parts_edges.append(picked)
        if take < budget:
            logger.info("merge %d: %d inter-community candidates for budget %d", nd.id, len(idx), budget)
        records.append(MergeRecord(nd.id, budget, len(idx), take))
    edges = np.concatenate(parts_edges) if parts_edges else np.empty((0, 2), dtype=np.int64)
    return nodes, edges, records


def sample_cplusd(g: Graph, fraction: float = 0.1, d_alpha: float = 0.0, rng_seed=0,
                  hierarchy: tuple[Partition, Dendrogram] | None = None,
                  weighting: str = "community") -> SampleGraph:
    """C+D sample of ``round(fraction * n)`` nodes.

    ``hierarchy`` may pass a precomputed ``(partition, dendrogram)`` to skip
    community extraction; ``d_alpha`` shifts every exponent uniformly. The
    returned sample's ``meta`` carries per-leaf and per-merge shortfalls
    and the budget tree.
    """
    if hierarchy is None:
        hierarchy = extract_hierarchy(g)
    _, dend = hierarchy
    budgets = allocate_budgets(dend, fraction, d_alpha)
    streams = np.random.SeedSequence(int(rng_seed) & 0xFFFFFFFFFFFFFFFF).spawn(dend.n_leaves + 1)
    leaf_samples = []
    for leaf in dend.leaves:
        b = int(budgets.node_budget[leaf.id])
        if b == 0:
            leaf_samples.append(CommunitySample(leaf.id, np.empty(0, dtype=np.int64), np.empty((0, 2), dtype=np.int64)))
            continue
        leaf_samples.append(sample_within_community(
            g, leaf.nodes, b, int(budgets.edge_budget[leaf.id]), streams[leaf.id], leaf.id, weighting))
    nodes, edges, merges = merge_dendrogram(g, dend, budgets, leaf_samples, streams[-1])
    params = SamplerParams(fraction=fraction, rng_seed=int(rng_seed))
    meta = {
        "d_alpha": float(d_alpha),
        "weighting": weighting,
        "budgets": budgets,
        "leaf_samples": leaf_samples,
        "merges": merges,
        "edge_budget_total": int(sum(budgets.edge_budget[l.id] for l in dend.leaves)
                                 + budgets.inter_edge_budget.sum()),
        "shortfall_edges": int(sum(s.edge_shortfall for s in leaf_samples) + sum(r.shortfall for r in merges)),
    }
    return SampleGraph(g, nodes, edges, METHOD_TAG, params, meta)


def write_shortfall_report(sample: SampleGraph, stream) -> None:
    """CSV of per-leaf and per-merge budgets against what was actually selected."""
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["kind", "id", "node_budget", "nodes_selected", "edge_budget", "edges_selected",
                "candidates", "node_shortfall", "edge_shortfall"])
    budgets = sample.meta["budgets"]
    for s in sample.meta["leaf_samples"]:
        nb, eb = int(budgets.node_budget[s.leaf]), int(budgets.edge_budget[s.leaf])
        w.writerow(["leaf", s.leaf, nb, len(s.nodes), eb, len(s.edges), "", s.node_shortfall, s.edge_shortfall])
    for r in sample.meta["merges"]:
        w.writerow(["merge", r.node, "", "", r.budget, r.selected, r.candidates, "", r.shortfall])
