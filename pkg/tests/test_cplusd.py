import io
import itertools

import numpy as np
import pytest

from cdsample.budget import allocate_budgets
from cdsample.community import Dendrogram, Partition, extract_hierarchy
from cdsample.cplusd import (
    merge_dendrogram,
    sample_cplusd,
    sample_within_community,
    write_shortfall_report,
)
from cdsample.graph import Graph, induced_edges
from cdsample.harness import preferential_attachment

from conftest import complete, gnp


def gnm(n, m, seed):
    rng = np.random.default_rng(seed)
    pairs = list(itertools.combinations(range(n), 2))
    return Graph.from_edges(n, [pairs[i] for i in rng.choice(len(pairs), m, replace=False)])


def test_within_full_size():
    g = gnp(30, 0.2, 0)
    comm = np.arange(30)
    s = sample_within_community(g, comm, 30, g.n_edges, 0)
    assert s.nodes.tolist() == list(range(30))
    assert sorted(map(tuple, s.edges.tolist())) == list(map(tuple, g.edges.tolist()))
    assert s.edge_shortfall == 0


def test_within_single_node():
    g = complete(5)
    s = sample_within_community(g, range(5), 1, 7, 3)
    assert len(s.nodes) == 1 and len(s.edges) == 0 and s.edge_shortfall == 7


def test_within_triangle_pairs_uniform():
    g = complete(3)
    counts = {}
    trials = 10_000
    for seed in range(trials):
        s = sample_within_community(g, [0, 1, 2], 2, 1, seed)
        assert len(s.edges) == 1 and s.edges[0].tolist() == s.nodes.tolist()
        key = tuple(s.nodes.tolist())
        counts[key] = counts.get(key, 0) + 1
    assert set(counts) == {(0, 1), (0, 2), (1, 2)}
    sd = np.sqrt(trials * (1 / 3) * (2 / 3))
    for c in counts.values():
        assert abs(c - trials / 3) <= 3 * sd


def test_within_uses_community_degree():
    # node 0 is a hub globally but isolated inside the community {0,1,2,3}
    g = Graph.from_edges(10, [(1, 2), (2, 3)] + [(0, j) for j in range(4, 10)])
    picks = [sample_within_community(g, [0, 1, 2, 3], 1, 0, s).nodes[0] for s in range(500)]
    assert 0 not in picks
    picks = [sample_within_community(g, [0, 1, 2, 3], 1, 0, s, weighting="global").nodes[0] for s in range(500)]
    assert 0 in picks


def test_within_node_shortfall():
    s = sample_within_community(complete(4), [0, 1], 3, 1, 0)
    assert s.node_shortfall == 1 and len(s.nodes) == 2


def test_single_leaf_worked_example():
    g = gnm(500, 1000, 0)
    d = Dendrogram.single(g)
    for seed in range(5):
        s = sample_cplusd(g, 0.1, 0.0, seed, hierarchy=(Partition.from_labels(np.zeros(500, int)), d))
        assert s.n_nodes == 50
        assert s.n_edges <= 77
        budget = s.meta["budgets"].edge_budget[0]
        assert s.n_edges == min(budget, len(induced_edges(g, s.nodes)))


def test_two_triangles_bridge_forced(two_triangles):
    g = two_triangles
    hier = extract_hierarchy(g)
    _, d = hier
    bt = allocate_budgets(d, 1.0)
    leaves = [sample_within_community(g, l.nodes, int(bt.node_budget[l.id]), int(bt.edge_budget[l.id]), l.id, l.id)
              for l in d.leaves]
    bt.inter_edge_budget[d.root.id] = 1
    nodes, edges, recs = merge_dendrogram(g, d, bt, leaves, 0)
    assert [2, 3] in edges.tolist()
    assert recs[0].candidates == 1 and recs[0].selected == 1
    bt.inter_edge_budget[d.root.id] = 0
    _, edges, _ = merge_dendrogram(g, d, bt, leaves, 0)
    assert [2, 3] not in edges.tolist() and len(edges) == 6


def test_merge_needs_one_sample_per_leaf(two_triangles):
    _, d = extract_hierarchy(two_triangles)
    bt = allocate_budgets(d, 0.5)
    with pytest.raises(ValueError):
        merge_dendrogram(two_triangles, d, bt, [], 0)


def test_full_fraction_recovers_graph():
    for seed in range(3):
        g = gnp(120, 0.05, seed)
        s = sample_cplusd(g, 1.0, 0.0, seed)
        d = s.meta["budgets"].dendrogram
        assert s.n_nodes == 120
        assert abs(s.n_edges - g.n_edges) <= 1 + len(d)


@pytest.mark.parametrize("seed", range(4))
def test_contracts_on_pa(seed):
    g = preferential_attachment(600, 3, seed)
    s = sample_cplusd(g, 0.1, 0.0, seed)
    s.validate()
    bt = s.meta["budgets"]
    d = bt.dendrogram
    assert s.n_nodes == 60 == bt.node_budget[: d.n_leaves].sum()
    total = s.meta["edge_budget_total"]
    assert s.n_edges <= total
    assert s.n_edges + s.meta["shortfall_edges"] == total
    leaf_of = np.full(g.node_count, -1)
    for l in d.leaves:
        leaf_of[l.nodes] = l.id
    for cs in s.meta["leaf_samples"]:
        assert set(cs.nodes.tolist()) <= set(d[cs.leaf].nodes.tolist())
        assert np.all(leaf_of[cs.edges] == cs.leaf)


def test_d_alpha_sweep_monotone():
    g = preferential_attachment(800, 4, 1)
    hier = extract_hierarchy(g)
    for seed in range(3):
        counts = [sample_cplusd(g, 0.2, da, seed, hier).n_edges for da in np.round(np.arange(-0.5, 0.51, 0.1), 1)]
        assert all(a <= b for a, b in zip(counts, counts[1:])), counts


def test_determinism_and_leaf_streams():
    g = preferential_attachment(500, 3, 2)
    a = sample_cplusd(g, 0.1, 0.0, 11)
    b = sample_cplusd(g, 0.1, 0.0, 11)
    c = sample_cplusd(g, 0.1, 0.0, 12)
    assert np.array_equal(a.nodes, b.nodes) and np.array_equal(a.edges, b.edges)
    assert not (np.array_equal(a.nodes, c.nodes) and np.array_equal(a.edges, c.edges))
    ba, bb = io.StringIO(), io.StringIO()
    a.write(ba)
    b.write(bb)
    assert ba.getvalue() == bb.getvalue()


def test_shortfall_report():
    g = preferential_attachment(400, 2, 0)
    s = sample_cplusd(g, 0.1, 0.0, 0)
    buf = io.StringIO()
    write_shortfall_report(s, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0].startswith("kind,id,node_budget")
    d = s.meta["budgets"].dendrogram
    assert len(lines) == 1 + len(d)
    short = 0
    for row in lines[1:]:
        short += int(row.split(",")[-1])
    assert short == s.meta["shortfall_edges"]


def test_empty_leaf_budget_contributes_nothing():
    g = Graph.from_edges(12, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (6, 7), (7, 8), (6, 8), (9, 10), (10, 11), (9, 11),
                              (2, 3), (5, 6), (8, 9)])
    s = sample_cplusd(g, 1 / 12, 0.0, 0)
    assert s.n_nodes == 1
    assert sum(len(cs.nodes) == 0 for cs in s.meta["leaf_samples"]) == len(s.meta["leaf_samples"]) - 1
