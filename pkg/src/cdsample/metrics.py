"""Graph-property distributions and the K-S D-statistic used to compare them.

Five properties are compared between an original graph and a sample:

* ``degree``: fraction of nodes per degree
* ``sval``: top singular values of the adjacency matrix
* ``svec``: absolute components of the principal singular vector
* ``cc``: average clustering coefficient per degree, normalized to unit mass
* ``hop``: new reachable pairs per hop, normalized by all reachable pairs
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .budget import densification_exponent
from .graph import Graph

KINDS = ("degree", "sval", "svec", "cc", "hop")
DEFAULT_SVD_K = 100
EXACT_HOP_LIMIT = 100_000
DENSE_SPECTRAL_LIMIT = 500


class SpectralConvergenceError(RuntimeError):
    def __init__(self, message: str, residual: float):
        self.residual = residual
        super().__init__(f"{message} (residual norm {residual:.3e})")


@dataclass(frozen=True)
class Distribution:
    """Discrete distribution on a strictly increasing support.

    An empty support means the property is undefined for the graph (for
    example no node of degree 2 or more for ``cc``); ``flags`` records such
    fallbacks.
    """

    support: np.ndarray
    mass: np.ndarray
    kind: str
    flags: tuple = ()

    def __post_init__(self):
        s = np.asarray(self.support, dtype=np.float64)
        m = np.asarray(self.mass, dtype=np.float64)
        if s.shape != m.shape or s.ndim != 1:
            raise ValueError("support and mass must be 1-D of equal length")
        if len(s) > 1 and np.any(np.diff(s) <= 0):
            raise ValueError("support must be strictly increasing")
        if np.any(m < 0):
            raise ValueError("mass must be nonnegative")
        if len(m) and abs(m.sum() - 1.0) > 1e-12:
            raise ValueError(f"mass sums to {m.sum()!r}, not 1")
        object.__setattr__(self, "support", s)
        object.__setattr__(self, "mass", m)

    @classmethod
    def from_weights(cls, values, weights, kind: str, flags=(), decimals: int | None = None) -> "Distribution":
        """Aggregate weights over equal values and normalize to unit mass."""
        v = np.asarray(values, dtype=np.float64)
        w = np.asarray(weights, dtype=np.float64)
        if decimals is not None:
            v = np.round(v, decimals) + 0.0  # + 0.0 folds -0.0
        if len(v) == 0:
            return cls(np.empty(0), np.empty(0), kind, tuple(flags))
        uniq, inv = np.unique(v, return_inverse=True)
        agg = np.bincount(inv, weights=w, minlength=len(uniq))
        total = agg.sum()
        if total <= 0:
            raise ValueError("total weight must be positive")
        mass = agg / total
        # keep the sum within 1e-12 of 1 after division
        mass[-1] = max(0.0, 1.0 - mass[:-1].sum())
        return cls(uniq, mass, kind, tuple(flags))

    @classmethod
    def from_values(cls, values, kind: str, flags=(), decimals: int | None = None) -> "Distribution":
        v = np.asarray(values, dtype=np.float64)
        return cls.from_weights(v, np.ones(len(v)), kind, flags, decimals)

    @property
    def is_empty(self) -> bool:
        return len(self.support) == 0

    @property
    def cdf(self) -> np.ndarray:
        return np.cumsum(self.mass)

    def cdf_at(self, x) -> np.ndarray:
        """Right-continuous CDF evaluated at ``x``."""
        idx = np.searchsorted(self.support, np.asarray(x, dtype=np.float64), side="right")
        c = np.concatenate([[0.0], self.cdf])
        return c[idx]

    def write_csv(self, stream) -> None:
        stream.write(f"# kind={self.kind}" + (f" flags={','.join(self.flags)}" if self.flags else "") + "\n")
        stream.write("x,mass,cdf\n")
        for x, m, c in zip(self.support.tolist(), self.mass.tolist(), self.cdf.tolist()):
            stream.write(f"{x!r},{m!r},{c!r}\n")


# properties -----------------------------------------------------------------

def degree_distribution(g: Graph) -> Distribution:
    if g.node_count == 0:
        raise ValueError("degree distribution of an empty graph")
    return Distribution.from_values(g.degree, "degree")


def _dense_adjacency(g: Graph) -> np.ndarray:
    return g.adjacency_matrix().toarray()


def _lanczos(A, k: int, which: str, n: int):
    v0 = np.random.default_rng(0).random(n) + 0.5
    try:
        return eigsh(A, k=k, which=which, v0=v0, tol=0.0, maxiter=max(10 * n, 1000))
    except ArpackNoConvergence as exc:
        vals, vecs = exc.eigenvalues, exc.eigenvectors
        if len(vals):
            res = float(max(np.linalg.norm(A @ vecs[:, i] - vals[i] * vecs[:, i]) for i in range(len(vals))))
        else:
            res = math.inf
        raise SpectralConvergenceError(f"eigensolver did not converge for k={k}", res) from exc


def _use_dense(n: int, r: int, method: str) -> bool:
    if method == "dense":
        return True
    if method == "lanczos":
        if r >= n - 1:
            raise ValueError(f"Lanczos needs k < n - 1 (k={r}, n={n})")
        return False
    if method != "auto":
        raise ValueError(f"unknown spectral method {method!r}")
    return n <= DENSE_SPECTRAL_LIMIT or r >= n - 1


def top_singular_values(g: Graph, k: int = DEFAULT_SVD_K, method: str = "auto") -> np.ndarray:
    """Largest ``min(k, n)`` singular values of the adjacency matrix, descending.

    The adjacency is symmetric, so these are the largest-magnitude
    eigenvalues in absolute value. ``method`` is ``"auto"``, ``"dense"`` or
    ``"lanczos"``.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    n = g.node_count
    r = min(k, n)
    if r == 0:
        return np.empty(0)
    if g.n_edges == 0:
        return np.zeros(r)
    if _use_dense(n, r, method):
        vals = np.linalg.eigvalsh(_dense_adjacency(g))
    else:
        vals, _ = _lanczos(g.adjacency_matrix(), r, "LM", n)
    return np.sort(np.abs(vals))[::-1][:r]


def principal_singular_vector(g: Graph, method: str = "auto") -> np.ndarray:
    """Unit left singular vector of the largest singular value, as absolute values.

    For a nonnegative symmetric matrix this is the eigenvector of the largest
    (Perron) eigenvalue.
    """
    n = g.node_count
    if g.n_edges == 0:
        raise ValueError("singular vector of a graph without edges")
    if _use_dense(n, 1, method):
        _, vecs = np.linalg.eigh(_dense_adjacency(g))
        vec = vecs[:, -1]
    else:
        _, vecs = _lanczos(g.adjacency_matrix(), 1, "LA", n)
        vec = vecs[:, 0]
    vec = np.abs(vec)
    return vec / np.linalg.norm(vec)


def singular_value_distribution(g: Graph, k: int = DEFAULT_SVD_K, method: str = "auto") -> Distribution:
    return Distribution.from_values(top_singular_values(g, k, method), "sval", decimals=10)


def singular_vector_distribution(g: Graph, method: str = "auto") -> Distribution:
    return Distribution.from_values(principal_singular_vector(g, method), "svec", decimals=12)


def triangles(g: Graph) -> np.ndarray:
    """Number of triangles through each node."""
    A = g.adjacency_matrix()
    return np.asarray((A @ A).multiply(A).sum(axis=1)).ravel() / 2.0


def clustering(g: Graph) -> np.ndarray:
    """Local clustering coefficient per node; NaN for degree < 2."""
    d = g.degree.astype(np.float64)
    pairs = d * (d - 1) / 2
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(d >= 2, triangles(g) / pairs, np.nan)


def clustering_by_degree(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    """Distinct degrees ``>= 2`` and the mean clustering coefficient of nodes with that degree."""
    cc = clustering(g)
    keep = g.degree >= 2
    if not keep.any():
        return np.empty(0, dtype=np.int64), np.empty(0)
    degs, inv = np.unique(g.degree[keep], return_inverse=True)
    sums = np.bincount(inv, weights=cc[keep])
    counts = np.bincount(inv)
    return degs, sums / counts


def cc_distribution(g: Graph) -> Distribution:
    """Average-CC-per-degree curve scaled to unit mass over its degree support.

    If every average is zero (a forest, say) the mass is uniform over the
    support and the ``cc_all_zero`` flag is set.
    """
    degs, avg = clustering_by_degree(g)
    if len(degs) == 0:
        return Distribution(np.empty(0), np.empty(0), "cc", ("empty",))
    if avg.sum() <= 0:
        return Distribution.from_weights(degs, np.ones(len(degs)), "cc", ("cc_all_zero",))
    return Distribution.from_weights(degs, avg, "cc")


def hop_plot(g: Graph, mode: str = "auto", sources: int = 1000, rng_seed: int = 0,
             batch: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Reachable unordered pairs within ``h`` hops, for ``h = 1..h_max``.

    ``mode="exact"`` runs a BFS from every node; ``"sampled"`` from
    ``sources`` uniformly chosen nodes and scales counts by
    ``n / sources``; ``"auto"`` is exact up to 100,000 nodes. BFS runs
    level-synchronously over a batch of sources at once.
    """
    n = g.node_count
    if mode == "auto":
        mode = "exact" if n <= EXACT_HOP_LIMIT else "sampled"
    if mode == "exact":
        src = np.arange(n)
        scale = 1.0
    elif mode == "sampled":
        s = min(sources, n)
        src = np.sort(np.random.default_rng(rng_seed).choice(n, size=s, replace=False))
        scale = n / s if s else 0.0
    else:
        raise ValueError(f"unknown hop mode {mode!r}")
    if g.n_edges == 0 or n == 0:
        return np.empty(0, dtype=np.int64), np.empty(0)
    A = g.adjacency_matrix().astype(np.float32)
    if batch is None:
        batch = int(max(1, min(512, 20_000_000 // max(n, 1))))
    counts: list[float] = []
    for start in range(0, len(src), batch):
        idx = src[start:start + batch]
        b = len(idx)
        frontier = np.zeros((n, b), dtype=np.float32)
        frontier[idx, np.arange(b)] = 1.0
        seen = frontier.astype(bool)
        h = 0
        while True:
            h += 1
            nxt = np.asarray(A @ frontier) > 0
            nxt &= ~seen
            c = int(nxt.sum())
            if c == 0:
                break
            if len(counts) < h:
                counts.append(0.0)
            counts[h - 1] += c
            seen |= nxt
            frontier = nxt.astype(np.float32)
    if not counts:
        return np.empty(0, dtype=np.int64), np.empty(0)
    pairs = np.cumsum(np.asarray(counts) * scale) / 2.0
    return np.arange(1, len(pairs) + 1), pairs


def hop_distribution(g: Graph, mode: str = "auto", sources: int = 1000, rng_seed: int = 0) -> Distribution:
    """Share of reachable pairs first reached at each hop; unreachable pairs are ignored."""
    hops, P = hop_plot(g, mode, sources, rng_seed)
    if len(hops) == 0:
        return Distribution(np.empty(0), np.empty(0), "hop", ("empty",))
    new = np.diff(np.concatenate([[0.0], P]))
    return Distribution.from_weights(hops, new, "hop")


def graph_properties(g: Graph, svd_k: int = DEFAULT_SVD_K, hop_mode: str = "auto",
                     hop_sources: int = 1000, rng_seed: int = 0) -> dict:
    """All five property distributions of ``g``, keyed by kind."""
    if g.n_edges:
        svec = singular_vector_distribution(g)
    else:
        svec = Distribution(np.empty(0), np.empty(0), "svec", ("empty",))
    return {
        "degree": degree_distribution(g),
        "sval": singular_value_distribution(g, svd_k),
        "svec": svec,
        "cc": cc_distribution(g),
        "hop": hop_distribution(g, hop_mode, hop_sources, rng_seed),
    }


# comparison -----------------------------------------------------------------

def ks_dstat(a: Distribution, b: Distribution) -> float:
    """``max_x |F_a(x) - F_b(x)|`` over the union of both supports.

    Both empty gives 0; exactly one empty gives 1.
    """
    if a.kind != b.kind:
        raise ValueError(f"cannot compare {a.kind!r} with {b.kind!r}")
    if a.is_empty or b.is_empty:
        return 0.0 if (a.is_empty and b.is_empty) else 1.0
    xs = np.union1d(a.support, b.support)
    d = float(np.max(np.abs(a.cdf_at(xs) - b.cdf_at(xs))))
    return min(max(d, 0.0), 1.0)


def compare_properties(original: dict, sample: dict) -> dict:
    return {k: ks_dstat(original[k], sample[k]) for k in KINDS}


def minmax_normalize(columns) -> np.ndarray:
    """Rescale each column to ``[0, 1]``; constant columns become zeros. NaNs are kept and ignored."""
    X = np.asarray(columns, dtype=np.float64)
    squeeze = X.ndim == 1
    if squeeze:
        X = X[:, None]
    out = np.zeros_like(X)
    for j in range(X.shape[1]):
        col = X[:, j]
        ok = ~np.isnan(col)
        if ok.sum() == 0:
            out[:, j] = np.nan
            continue
        lo, hi = col[ok].min(), col[ok].max()
        out[:, j] = 0.0 if hi == lo else (col - lo) / (hi - lo)
        out[~ok, j] = np.nan
    return out[:, 0] if squeeze else out


def consistency_stddev(runs) -> float:
    """Sample standard deviation (``n - 1`` denominator) of repeated D values."""
    r = np.asarray(runs, dtype=np.float64)
    if len(r) < 2:
        raise ValueError("need at least two runs")
    return float(np.std(r, ddof=1))


def dpl_difference(original: Graph, sample) -> float:
    """Signed ``alpha(sample) - alpha(original)``; ``sample`` is a Graph or SampleGraph."""
    a0 = densification_exponent(original.node_count, original.n_edges)
    n_s = getattr(sample, "n_nodes", None)
    n_s = sample.node_count if n_s is None else n_s
    a1 = densification_exponent(n_s, sample.n_edges)
    if a0 is None or a1 is None:
        raise ValueError("densification exponent undefined (need n >= 2 and e >= 1)")
    return a1 - a0
