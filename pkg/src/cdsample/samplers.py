"""Baseline graph samplers and their community / DPL hybrids.

Node selection (RN, RDN, RPN) keeps every parent edge among the chosen
nodes. Edge selection (RE, RNE) keeps exactly the chosen edges and their
endpoints. Exploration (RW, RJ, FF) grows a visited set to the node budget
and keeps either the traversed edges or, with ``induced=True``, every edge
among the visited nodes.

All samplers are deterministic given ``params.rng_seed``.
"""

from __future__ import annotations

import logging
from collections import deque

import numpy as np

from ._random import make_rng, weighted_sample
from .budget import apportion, densification_exponent, dpl_edge_target, round_half_up
from .community import Partition
from .graph import Graph, induced_edges, induced_subgraph
from .sample import SampleGraph, SamplerParams

logger = logging.getLogger(__name__)

NODE_METHODS = ("RN", "RDN", "RPN")
EDGE_METHODS = ("RE", "RNE")
EXPLORATION_METHODS = ("RW", "RJ", "FF")
WRAPPABLE = ("RN", "RDN", "RE", "RW")


def node_budget(n: int, fraction: float) -> int:
    k = round_half_up(fraction * n)
    if k < 1:
        raise ValueError(f"node budget round({fraction} * {n}) is zero")
    return k


def edge_budget(m: int, fraction: float) -> int:
    return round_half_up(fraction * m)


def pagerank(g: Graph, damping: float = 0.85, tol: float = 1e-10, max_iter: int = 200) -> np.ndarray:
    """PageRank by power iteration with a uniform teleport vector.

    Mass at degree-zero nodes is spread uniformly. Stops when the L1 change
    drops below ``tol`` or after ``max_iter`` sweeps.
    """
    n = g.node_count
    if n == 0:
        return np.empty(0)
    A = g.adjacency_matrix()
    deg = g.degree.astype(np.float64)
    dangling = deg == 0
    inv = np.divide(1.0, deg, out=np.zeros(n), where=~dangling)
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = damping * (A @ (x * inv)) + (damping * x[dangling].sum() + 1.0 - damping) / n
        delta = np.abs(nxt - x).sum()
        x = nxt
        if delta < tol:
            break
    return x / x.sum()


# node selection -------------------------------------------------------------

def _select_nodes(g: Graph, k: int, method: str, rng, damping: float = 0.85):
    n = g.node_count
    if method == "RN":
        return rng.choice(n, size=k, replace=False), method
    if method == "RDN":
        w = g.degree
        tag = method if w.sum() > 0 else "RDN[uniform]"
        return weighted_sample(rng, w, k), tag
    if method == "RPN":
        return weighted_sample(rng, pagerank(g, damping), k), method
    raise ValueError(f"unknown node-selection method {method!r}")


def sample_node_based(g: Graph, method: str, p: SamplerParams) -> SampleGraph:
    """RN, RDN or RPN: pick ``round(fraction * n)`` nodes, keep all edges among them."""
    rng = make_rng(p.rng_seed)
    k = node_budget(g.node_count, p.fraction)
    nodes, tag = _select_nodes(g, k, method, rng, p.pagerank_damping)
    return SampleGraph.induced(g, nodes, tag, p)


def sample_rn(g: Graph, p: SamplerParams) -> SampleGraph:
    return sample_node_based(g, "RN", p)


def sample_rdn(g: Graph, p: SamplerParams) -> SampleGraph:
    return sample_node_based(g, "RDN", p)


def sample_rpn(g: Graph, p: SamplerParams) -> SampleGraph:
    return sample_node_based(g, "RPN", p)


# edge selection -------------------------------------------------------------

def _check_edge_budget(g: Graph, budget: int) -> None:
    if not 1 <= budget <= g.n_edges:
        raise ValueError(f"edge budget {budget} outside [1, {g.n_edges}]")


def _random_edges(g: Graph, budget: int, rng) -> np.ndarray:
    return g.edges[rng.choice(g.n_edges, size=budget, replace=False)]


def _random_node_edges(g: Graph, budget: int, rng) -> np.ndarray:
    n = g.node_count
    indptr, indices, deg = g.indptr, g.indices, g.degree
    chosen: set = set()
    out = []
    while len(out) < budget:
        v = int(rng.integers(n))
        d = int(deg[v])
        if d == 0:
            continue
        w = int(indices[indptr[v] + int(rng.integers(d))])
        e = (v, w) if v < w else (w, v)
        if e not in chosen:
            chosen.add(e)
            out.append(e)
    return np.array(out, dtype=np.int64).reshape(-1, 2)


def sample_re(g: Graph, budget: int | None, p: SamplerParams) -> SampleGraph:
    """RE: ``budget`` edges uniformly without replacement, plus their endpoints."""
    if budget is None:
        budget = edge_budget(g.n_edges, p.fraction)
    _check_edge_budget(g, budget)
    rng = make_rng(p.rng_seed)
    return SampleGraph.from_edges(g, _random_edges(g, budget, rng), "RE", p)


def sample_rne(g: Graph, budget: int | None, p: SamplerParams) -> SampleGraph:
    """RNE: repeatedly pick a uniform node, then a uniform incident edge, until ``budget`` distinct edges."""
    if budget is None:
        budget = edge_budget(g.n_edges, p.fraction)
    _check_edge_budget(g, budget)
    rng = make_rng(p.rng_seed)
    return SampleGraph.from_edges(g, _random_node_edges(g, budget, rng), "RNE", p)


# exploration ----------------------------------------------------------------

def _unvisited(rng, n: int, visited) -> int:
    while True:
        v = int(rng.integers(n))
        if v not in visited:
            return v


def random_walk(g: Graph, budget: int, rng, restart: float = 0.15, jump: bool = False, start: int | None = None):
    """Walk with restart until ``budget`` distinct nodes are visited.

    On restart the walker returns to its seed (``jump=False``, RW) or jumps
    to a fresh uniform node (``jump=True``, RJ). If the visited set has not
    grown for ``100 * budget`` steps, or the walker sits on a node without
    neighbors, it re-seeds at a uniform unvisited node.

    Returns ``(visited_in_order, traversed_edges, reseeds)``.
    """
    n = g.node_count
    if not 1 <= budget <= n:
        raise ValueError(f"node budget {budget} outside [1, {n}]")
    indptr, indices, deg = g.indptr, g.indices, g.degree
    seed = int(rng.integers(n)) if start is None else int(start)
    visited = {seed}
    order = [seed]
    traversed: set = set()
    cur = seed
    stall = 0
    reseeds = 0
    limit = 100 * budget
    while len(visited) < budget:
        if stall >= limit or (deg[cur] == 0 and not jump):
            seed = cur = _unvisited(rng, n, visited)
            reseeds += 1
            stall = 0
            visited.add(cur)
            order.append(cur)
            continue
        before = len(visited)
        if rng.random() < restart or deg[cur] == 0:
            if jump:
                cur = int(rng.integers(n))
                if cur not in visited:
                    visited.add(cur)
                    order.append(cur)
            else:
                cur = seed
        else:
            nxt = int(indices[indptr[cur] + int(rng.integers(deg[cur]))])
            traversed.add((cur, nxt) if cur < nxt else (nxt, cur))
            cur = nxt
            if cur not in visited:
                visited.add(cur)
                order.append(cur)
        stall = 0 if len(visited) > before else stall + 1
    return order, traversed, reseeds


def forest_fire(g: Graph, budget: int, rng, p_forward: float = 0.3, start: int | None = None):
    """Forest Fire burning until ``budget`` nodes are burned.

    Each burning node ignites ``x ~ Geometric`` (support 0, 1, ..., mean
    ``p_forward / (1 - p_forward)``) of its unburned neighbors, chosen
    uniformly, breadth-first. A dead fire re-ignites at a uniform unburned
    node.

    Returns ``(burned_in_order, traversed_edges, reseeds)``; the traversed
    edges form a forest.
    """
    n = g.node_count
    if not 1 <= budget <= n:
        raise ValueError(f"node budget {budget} outside [1, {n}]")
    visited: set = set()
    order = []
    traversed = []
    reseeds = -1
    while len(visited) < budget:
        s = _unvisited(rng, n, visited) if start is None or visited else int(start)
        reseeds += 1
        visited.add(s)
        order.append(s)
        queue = deque([s])
        while queue and len(visited) < budget:
            v = queue.popleft()
            x = int(rng.geometric(1.0 - p_forward)) - 1
            if x == 0:
                continue
            fresh = [w for w in g.neighbors(v).tolist() if w not in visited]
            if not fresh:
                continue
            picks = rng.choice(len(fresh), size=min(x, len(fresh)), replace=False)
            for i in picks.tolist():
                if len(visited) >= budget:
                    break
                w = fresh[i]
                visited.add(w)
                order.append(w)
                traversed.append((v, w) if v < w else (w, v))
                queue.append(w)
    return order, traversed, reseeds


def sample_exploration(g: Graph, method: str, p: SamplerParams) -> SampleGraph:
    """RW, RJ or FF grown to ``round(fraction * n)`` nodes.

    With ``p.induced`` the sample keeps all parent edges among the visited
    nodes and the tag gets an ``(i)`` suffix.
    """
    rng = make_rng(p.rng_seed)
    k = node_budget(g.node_count, p.fraction)
    if method in ("RW", "RJ"):
        order, traversed, reseeds = random_walk(g, k, rng, p.restart_probability, jump=(method == "RJ"))
    elif method == "FF":
        order, traversed, reseeds = forest_fire(g, k, rng, p.forward_burning_probability)
    else:
        raise ValueError(f"unknown exploration method {method!r}")
    meta = {"reseeds": reseeds}
    if p.induced:
        return SampleGraph.induced(g, order, f"{method}(i)", p, meta)
    return SampleGraph(g, np.array(order, dtype=np.int64), np.array(sorted(traversed), dtype=np.int64), method, p, meta)


# community-based wrappers ---------------------------------------------------

def wrap_community_based(base: str, g: Graph, part: Partition, p: SamplerParams,
                         budget: int | None = None) -> SampleGraph:
    """Run ``base`` separately inside every community and union the results.

    The global node budget (edge budget for RE) is apportioned over the
    communities by size (intra-community edge count for RE). RN, RDN and RW
    then keep every parent edge among the selected nodes; RE keeps only the
    selected intra-community edges. RDN weights by within-community degree.
    ``budget`` overrides the RE edge budget.
    """
    if base not in WRAPPABLE:
        raise ValueError(f"community-based wrapper does not support {base!r}")
    rng = make_rng(p.rng_seed)
    shortfall = 0
    chosen = []
    if base == "RE":
        total = edge_budget(g.n_edges, p.fraction) if budget is None else budget
        subs = [induced_subgraph(g, c) for c in part.communities]
        sizes = [s.n_edges for s in subs]
        if sum(sizes):
            shares = apportion(total, sizes)
        else:
            shares = np.zeros(len(subs), dtype=np.int64)
            shortfall = total
        for c, sub, b in zip(part.communities, subs, shares.tolist()):
            take = min(b, sub.n_edges)
            shortfall += b - take
            if take:
                chosen.append(c[_random_edges(sub, take, rng)])
        edges = np.concatenate(chosen) if chosen else np.empty((0, 2), dtype=np.int64)
        sample = SampleGraph.from_edges(g, edges, "CBasedRE", p, {"shortfall_edges": shortfall})
    else:
        total = node_budget(g.node_count, p.fraction)
        shares = apportion(total, [len(c) for c in part.communities])
        for c, b in zip(part.communities, shares.tolist()):
            if b == 0:
                continue
            if b > len(c):
                shortfall += b - len(c)
                b = len(c)
            sub = induced_subgraph(g, c)
            if base == "RW":
                local, _, _ = random_walk(sub, b, rng, p.restart_probability)
                local = np.asarray(local, dtype=np.int64)
            else:
                local, _ = _select_nodes(sub, b, base, rng)
            chosen.append(c[local])
        nodes = np.concatenate(chosen) if chosen else np.empty(0, dtype=np.int64)
        sample = SampleGraph.induced(g, nodes, f"CBased{base}", p, {"shortfall_nodes": shortfall})
    if shortfall:
        logger.info("%s: budget shortfall %d", sample.method, shortfall)
    return sample


# DPL-based wrappers ---------------------------------------------------------

def dpl_adjust(g: Graph, sample: SampleGraph, rng, alpha: float | None = None) -> SampleGraph:
    """Add or drop edges so the sample's edge count meets the whole-graph DPL target.

    Added edges come from parent edges among the sample's nodes; both
    adding and keeping draw with probability proportional to the sum of
    endpoint degrees. Nodes are never touched.
    """
    if alpha is None:
        alpha = densification_exponent(g.node_count, g.n_edges)
    meta = dict(sample.meta)
    if alpha is None:
        meta["dpl_skipped"] = True
        return SampleGraph(g, sample.nodes, sample.edges, sample.method, sample.params, meta)
    target = dpl_edge_target(sample.n_nodes, alpha, 0.0)
    meta["dpl_target"] = target
    edges = sample.edges
    deg = g.degree
    if len(edges) < target:
        cand = induced_edges(g, sample.nodes)
        if len(edges):
            have = np.isin(g.edge_ids(cand), g.edge_ids(edges))
            cand = cand[~have]
        need = target - len(edges)
        take = min(need, len(cand))
        if take < need:
            meta["dpl_shortfall"] = need - take
            logger.info("DPL adjust: %d candidate edges for %d needed", len(cand), need)
        if take:
            w = deg[cand[:, 0]] + deg[cand[:, 1]]
            edges = np.concatenate([edges, cand[weighted_sample(rng, w, take)]])
    elif len(edges) > target:
        w = deg[edges[:, 0]] + deg[edges[:, 1]]
        edges = edges[weighted_sample(rng, w, target)]
    return SampleGraph(g, sample.nodes, edges, sample.method, sample.params, meta)


def wrap_dpl_based(base: str, g: Graph, p: SamplerParams, budget: int | None = None) -> SampleGraph:
    """Run ``base`` then adjust its edge count to the DPL target (see :func:`dpl_adjust`)."""
    if base not in WRAPPABLE:
        raise ValueError(f"DPL-based wrapper does not support {base!r}")
    if base in NODE_METHODS:
        s = sample_node_based(g, base, p)
    elif base == "RE":
        s = sample_re(g, budget, p)
    else:
        s = sample_exploration(g, base, p)
    # separate stream so the base sample matches the plain method for the same seed
    rng = make_rng(np.random.SeedSequence([int(p.rng_seed) & 0xFFFFFFFFFFFFFFFF, 0xD91]))
    out = dpl_adjust(g, s, rng)
    out.method = f"DBased{base}"
    return out
