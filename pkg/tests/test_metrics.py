import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdsample.graph import Graph
from cdsample.metrics import (
    Distribution,
    cc_distribution,
    clustering,
    compare_properties,
    consistency_stddev,
    degree_distribution,
    dpl_difference,
    graph_properties,
    hop_distribution,
    hop_plot,
    ks_dstat,
    minmax_normalize,
    principal_singular_vector,
    singular_value_distribution,
    singular_vector_distribution,
    top_singular_values,
)
from cdsample.sample import SampleGraph

from conftest import complete, gnp, graphs, path, star


def dist(pairs, kind="degree"):
    xs, ms = zip(*pairs)
    return Distribution(np.array(xs, float), np.array(ms, float), kind)


def as_pairs(d):
    return np.column_stack([d.support, d.mass]).ravel().tolist()


# distributions --------------------------------------------------------------

def test_degree_examples():
    assert as_pairs(degree_distribution(complete(3))) == [2.0, 1.0]
    assert as_pairs(degree_distribution(star(4))) == pytest.approx([1.0, 0.8, 4.0, 0.2])
    assert as_pairs(degree_distribution(Graph.empty(3))) == [0.0, 1.0]


@settings(max_examples=50, deadline=None)
@given(graphs(max_nodes=20))
def test_degree_cdf_ends_at_one(g):
    d = degree_distribution(g)
    assert d.cdf_at(g.degree.max()) == pytest.approx(1.0, abs=1e-12)


def test_distribution_validation():
    with pytest.raises(ValueError):
        Distribution(np.array([2.0, 1.0]), np.array([0.5, 0.5]), "degree")
    with pytest.raises(ValueError):
        Distribution(np.array([1.0]), np.array([0.9]), "degree")
    d = Distribution.from_values([3, 1, 3, 3], "degree")
    assert as_pairs(d) == [1.0, 0.25, 3.0, 0.75]


def test_singular_value_examples():
    assert top_singular_values(complete(3)).tolist() == pytest.approx([2, 1, 1], abs=1e-12)
    assert top_singular_values(complete(2)).tolist() == pytest.approx([1, 1], abs=1e-12)
    assert top_singular_values(Graph.empty(4)).tolist() == [0, 0, 0, 0]
    d = singular_value_distribution(complete(3))
    assert as_pairs(d) == pytest.approx([1.0, 2 / 3, 2.0, 1 / 3])


def test_singular_vector_examples():
    assert principal_singular_vector(complete(3)) == pytest.approx([1 / math.sqrt(3)] * 3, abs=1e-9)
    assert principal_singular_vector(complete(2)) == pytest.approx([1 / math.sqrt(2)] * 2, abs=1e-9)
    v = principal_singular_vector(star(4))
    assert v[0] > v[1:].max()
    assert as_pairs(singular_vector_distribution(complete(3))) == pytest.approx([1 / math.sqrt(3), 1.0])
    with pytest.raises(ValueError):
        principal_singular_vector(Graph.empty(3))


def connected_gnp(n, p, seed):
    from cdsample.graph import connected_components
    while True:
        g = gnp(n, p, seed)
        if g.n_edges and connected_components(g)[0] == 1:
            return g
        seed += 1000


@pytest.mark.parametrize("seed", range(20))
def test_lanczos_matches_dense(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(8, 31))
    g = connected_gnp(n, 0.3, seed)
    A = g.adjacency_matrix().toarray()
    ref = np.linalg.svd(A, compute_uv=False)
    k = min(10, n - 2)
    got = top_singular_values(g, k, method="lanczos")
    assert got == pytest.approx(ref[:k], abs=1e-6)
    vec = principal_singular_vector(g, method="lanczos")
    _, V = np.linalg.eigh(A)
    assert vec == pytest.approx(np.abs(V[:, -1]), abs=1e-6)
    U, S, _ = np.linalg.svd(A)
    if S[0] - S[1] > 1e-6:  # bipartite graphs tie +lambda and -lambda
        assert vec == pytest.approx(np.abs(U[:, 0]), abs=1e-6)


def test_lanczos_rejects_large_k():
    with pytest.raises(ValueError):
        top_singular_values(complete(5), 4, method="lanczos")


def test_clustering_examples():
    assert clustering(complete(3)).tolist() == [1.0, 1.0, 1.0]
    assert as_pairs(cc_distribution(complete(3))) == [2.0, 1.0]
    assert clustering(star(4))[0] == 0.0
    # node 0 has neighbors 1, 2, 3 with one edge 1-2 among them
    g = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2)])
    assert clustering(g)[0] == pytest.approx(1 / 3)


def test_cc_against_networkx():
    nx = pytest.importorskip("networkx")
    g = gnp(40, 0.2, 1)
    G = nx.Graph()
    G.add_nodes_from(range(40))
    G.add_edges_from(g.edges.tolist())
    ref = nx.clustering(G)
    cc = clustering(g)
    for v in range(40):
        if g.degree[v] >= 2:
            assert cc[v] == pytest.approx(ref[v], abs=1e-12)


def test_cc_fallbacks():
    assert cc_distribution(path(2)).flags == ("empty",)
    d = cc_distribution(star(4))
    assert d.flags == ("cc_all_zero",) and as_pairs(d) == [4.0, 1.0]


@settings(max_examples=40, deadline=None)
@given(graphs(max_nodes=16))
def test_cc_in_unit_interval(g):
    cc = clustering(g)
    ok = ~np.isnan(cc)
    assert np.all((cc[ok] >= 0) & (cc[ok] <= 1))


def test_hop_examples():
    h, P = hop_plot(path(3))
    assert h.tolist() == [1, 2] and P.tolist() == [2, 3]
    assert as_pairs(hop_distribution(path(3))) == pytest.approx([1.0, 2 / 3, 2.0, 1 / 3])
    assert as_pairs(hop_distribution(complete(3))) == [1.0, 1.0]
    two = Graph.from_edges(4, [(0, 1), (2, 3)])
    h, P = hop_plot(two)
    assert P.tolist() == [2]
    assert hop_distribution(Graph.empty(3)).flags == ("empty",)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 40), st.floats(0.02, 0.4))
def test_hop_against_all_pairs_oracle(seed, n, p):
    from scipy.sparse.csgraph import shortest_path
    g = gnp(n, p, seed)
    h, P = hop_plot(g, batch=7)
    if g.n_edges == 0:
        assert len(h) == 0
        return
    D = shortest_path(g.adjacency_matrix(), unweighted=True)
    iu = np.triu_indices(n, 1)
    d = D[iu]
    d = d[np.isfinite(d)]
    expected = [int(np.sum(d <= k)) for k in range(1, int(d.max()) + 1)]
    assert P.tolist() == expected
    assert np.all(np.diff(P) >= 0)
    assert hop_distribution(g).mass.sum() == pytest.approx(1.0, abs=1e-12)


def test_hop_sampled_mode():
    g = gnp(80, 0.08, 3)
    h_exact, P_exact = hop_plot(g, "exact")
    h, P = hop_plot(g, "sampled", sources=80)
    assert np.allclose(P, P_exact)
    h, P = hop_plot(g, "sampled", sources=20, rng_seed=1)
    assert len(P) >= 1 and np.all(np.diff(P) >= 0)
    with pytest.raises(ValueError):
        hop_plot(g, "bogus")


# K-S ------------------------------------------------------------------------

def test_ks_examples():
    a = dist([(1, 0.5), (2, 0.5)])
    b = dist([(1, 1.0)])
    assert ks_dstat(a, b) == pytest.approx(0.5)
    assert ks_dstat(a, a) == 0.0
    assert ks_dstat(dist([(1, 1.0)]), dist([(5, 0.3), (6, 0.7)])) == 1.0
    with pytest.raises(ValueError):
        ks_dstat(a, dist([(1, 1.0)], "cc"))
    empty = Distribution(np.empty(0), np.empty(0), "degree")
    assert ks_dstat(empty, empty) == 0.0 and ks_dstat(empty, a) == 1.0


def random_dist(rng, kind="degree"):
    k = int(rng.integers(1, 8))
    support = np.unique(rng.integers(0, 12, size=k)).astype(float)
    if rng.random() < 0.5:
        support = support + rng.random(len(support)) * 0.5
    w = rng.random(len(support)) + 0.01
    return Distribution.from_weights(support, w, kind)


def brute_ks(a, b, step=0.01):
    lo = min(a.support.min(), b.support.min()) - 1
    hi = max(a.support.max(), b.support.max()) + 1
    grid = np.unique(np.concatenate([np.arange(lo, hi, step), a.support, b.support]))
    Fa = np.array([a.mass[a.support <= x].sum() for x in grid])
    Fb = np.array([b.mass[b.support <= x].sum() for x in grid])
    return float(np.max(np.abs(Fa - Fb)))


def test_ks_brute_force_grid():
    rng = np.random.default_rng(2024)
    for _ in range(300):
        a, b = random_dist(rng), random_dist(rng)
        d = ks_dstat(a, b)
        assert d == pytest.approx(brute_ks(a, b), abs=1e-12)
        assert d == ks_dstat(b, a)
        assert 0.0 <= d <= 1.0


def test_ks_against_scipy_two_sample():
    stats = pytest.importorskip("scipy.stats")
    rng = np.random.default_rng(5)
    for _ in range(50):
        x = rng.integers(0, 10, size=rng.integers(5, 40))
        y = rng.integers(0, 10, size=rng.integers(5, 40))
        ours = ks_dstat(Distribution.from_values(x, "degree"), Distribution.from_values(y, "degree"))
        assert ours == pytest.approx(stats.ks_2samp(x, y).statistic, abs=1e-12)


# summaries ------------------------------------------------------------------

def test_minmax():
    assert minmax_normalize([0.1, 0.3, 0.5]).tolist() == pytest.approx([0, 0.5, 1])
    assert minmax_normalize([0.2, 0.2]).tolist() == [0, 0]
    X = minmax_normalize([[0.1, 1.0], [0.3, 1.0], [np.nan, 1.0]])
    assert X[1, 0] == 1.0 and np.isnan(X[2, 0]) and X[:, 1].tolist() == [0, 0, 0]


def test_normalization_extremes():
    # three averages: lowest maps to 0, highest to 1
    norm = minmax_normalize([0.140, 0.235, 0.320])
    assert norm[0] == 0 and norm[2] == 1


def test_consistency():
    assert consistency_stddev([0.3, 0.3, 0.3]) == 0
    assert consistency_stddev([0, 1]) == pytest.approx(0.70710678118, abs=1e-9)
    with pytest.raises(ValueError):
        consistency_stddev([0.5])


def test_dpl_difference():
    g = gnp(60, 0.2, 1)
    assert dpl_difference(g, g) == 0
    tree = SampleGraph(g, np.arange(60), [(0, i) for i in range(1, 60) if g.has_edge(0, i)], "T")
    assert dpl_difference(g, tree) < 0
    with pytest.raises(ValueError):
        dpl_difference(g, Graph.empty(5))


def test_graph_properties_and_compare():
    g = gnp(50, 0.1, 0)
    props = graph_properties(g)
    assert set(props) == {"degree", "sval", "svec", "cc", "hop"}
    d = compare_properties(props, props)
    assert all(v == 0 for v in d.values())
    empty = graph_properties(Graph.empty(5))
    assert empty["svec"].is_empty and empty["hop"].is_empty
    d = compare_properties(props, empty)
    assert d["svec"] == 1.0 and d["hop"] == 1.0


def test_write_csv():
    buf = io.StringIO()
    dist([(1, 0.25), (2, 0.75)]).write_csv(buf)
    assert buf.getvalue() == "# kind=degree\nx,mass,cdf\n1.0,0.25,0.25\n2.0,0.75,1.0\n"
