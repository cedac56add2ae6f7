"""Experiment runner: sample with every method, score against the original, tabulate.

Each repetition ``i`` of a run uses the seed ``derive_seed(master_seed, i)``
(see :func:`cdsample._random.derive_seed`) for every method, so any cell of
any table can be recomputed from its ``(dataset, method, seed)`` triple,
which is also logged in ``runs.csv``.
"""

from __future__ import annotations

import configparser
import csv
import hashlib
import io
import logging
import math
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np
from scipy.stats import rankdata

from . import __version__
from ._random import derive_seed
from .community import extract_hierarchy
from .cplusd import sample_cplusd
from .graph import Graph, load_edge_list
from .metrics import KINDS, compare_properties, consistency_stddev, dpl_difference, graph_properties, minmax_normalize
from .sample import SampleGraph, SamplerParams
from .samplers import (
    EDGE_METHODS,
    NODE_METHODS,
    sample_exploration,
    sample_node_based,
    sample_re,
    sample_rne,
    wrap_community_based,
    wrap_dpl_based,
)

logger = logging.getLogger(__name__)

NODE_TABLE = ("C+D", "RN", "RDN", "RPN", "RW", "RJ", "FF", "RW(i)", "RJ(i)", "FF(i)")
EDGE_TABLE = ("C+D", "RE", "RNE")
ALL_METHODS = ("C+D", "RN", "RDN", "RPN", "RE", "RNE", "RW", "RJ", "FF", "RW(i)", "RJ(i)", "FF(i)")
HYBRID_BASES = ("RN", "RDN", "RE", "RW")
DEFAULT_SWEEP = tuple(round(x, 1) + 0.0 for x in np.arange(-0.5, 0.51, 0.1))
COLUMN_NAMES = {"degree": "Degree", "sval": "Sval", "svec": "Svec", "cc": "CC", "hop": "Hop"}


# methods --------------------------------------------------------------------

def run_method(g: Graph, tag: str, params: SamplerParams, *, d_alpha: float = 0.0,
               edge_budget: int | None = None, hierarchy=None) -> SampleGraph:
    """Dispatch a method tag (``"RN"``, ``"RW(i)"``, ``"CBasedRE"``, ``"C+D"``, ...) to its sampler.

    ``hierarchy`` is a cached ``(partition, dendrogram)`` for C+D and the
    community-based wrappers; it is computed when missing.
    """
    if tag == "C+D":
        return sample_cplusd(g, params.fraction, d_alpha, params.rng_seed, hierarchy=hierarchy)
    if tag.startswith("CBased"):
        part = (hierarchy or extract_hierarchy(g))[0]
        return wrap_community_based(tag[6:], g, part, params, budget=edge_budget)
    if tag.startswith("DBased"):
        return wrap_dpl_based(tag[6:], g, params, budget=edge_budget)
    if tag in NODE_METHODS:
        return sample_node_based(g, tag, params)
    if tag == "RE":
        return sample_re(g, edge_budget, params)
    if tag == "RNE":
        return sample_rne(g, edge_budget, params)
    m = re.fullmatch(r"(RW|RJ|FF)(\(i\))?", tag)
    if m:
        return sample_exploration(g, m.group(1), params.replace(induced=bool(m.group(2)) or params.induced))
    raise ValueError(f"unknown method {tag!r}")


def is_edge_based(tag: str) -> bool:
    return tag in EDGE_METHODS or tag in ("CBasedRE", "DBasedRE")


# datasets -------------------------------------------------------------------

def preferential_attachment(n: int, m: int, seed: int) -> Graph:
    """Barabasi-Albert graph (networkx generator) as a :class:`Graph`."""
    import networkx as nx

    G = nx.barabasi_albert_graph(n, m, seed=seed)
    return Graph.from_edges(n, np.array(G.edges(), dtype=np.int64).reshape(-1, 2))


def load_dataset(spec: str) -> tuple[str, Graph]:
    """``pa:<n>:<m>:<seed>`` for a synthetic graph, otherwise an edge-list path."""
    if spec.startswith("pa:"):
        try:
            n, m, seed = (int(x) for x in spec[3:].split(":"))
        except ValueError:
            raise ValueError(f"synthetic dataset must look like pa:<n>:<m>:<seed>, got {spec!r}") from None
        return f"pa-{n}-{m}-{seed}", preferential_attachment(n, m, seed)
    g, _ = load_edge_list(spec)
    name = os.path.basename(spec)
    for ext in (".txt", ".tsv", ".edges", ".csv"):
        if name.endswith(ext):
            name = name[: -len(ext)]
    return name, g


# config ---------------------------------------------------------------------

def _floats(s: str) -> tuple:
    return tuple(float(x) for x in re.split(r"[,\s]+", s.strip()) if x)


def _words(s: str) -> tuple:
    return tuple(x for x in re.split(r"[,\s]+", s.strip()) if x)


@dataclass(frozen=True)
class ExperimentConfig:
    datasets: tuple = ()
    methods: tuple = ()  # empty = the default set for each table
    fraction: float = 0.10
    repetitions: int = 10
    seed: int = 0
    d_alpha: tuple = DEFAULT_SWEEP
    edge_budget_policy: str = "fraction-of-edges"
    svd_k: int = 100
    hop_mode: str = "auto"
    hop_sources: int = 1000
    wrappers: tuple = ("community", "dpl")
    restart_probability: float = 0.15
    forward_burning_probability: float = 0.3
    workers: int = 1

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")
        if not 0 < self.fraction <= 1:
            raise ValueError("fraction must be in (0, 1]")
        if self.edge_budget_policy not in ("fraction-of-edges", "matched-to-cplusd"):
            raise ValueError(f"unknown edge_budget_policy {self.edge_budget_policy!r}")
        if not set(self.wrappers) <= {"community", "dpl"}:
            raise ValueError(f"unknown wrappers {self.wrappers!r}")

    def params(self, seed: int) -> SamplerParams:
        return SamplerParams(fraction=self.fraction, restart_probability=self.restart_probability,
                             forward_burning_probability=self.forward_burning_probability, rng_seed=seed)

    def canonical(self) -> str:
        return "\n".join(f"{f.name} = {getattr(self, f.name)!r}" for f in fields(self))

    def digest(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]

    def run_seed(self, rep: int) -> int:
        return derive_seed(self.seed, rep)


_PARSERS = {
    "datasets": _words, "dataset": _words, "methods": _words, "fraction": float, "repetitions": int,
    "seed": int, "d_alpha": _floats, "edge_budget_policy": str, "svd_k": int, "hop_mode": str,
    "hop_sources": int, "wrappers": _words, "restart_probability": float,
    "forward_burning_probability": float, "workers": int,
}


def parse_config(text: str, base_dir: str = ".") -> ExperimentConfig:
    """Parse ``key = value`` lines (``#`` comments). Relative dataset paths resolve against ``base_dir``."""
    cp = configparser.ConfigParser(comment_prefixes=("#", ";"), inline_comment_prefixes=("#",))
    cp.optionxform = str
    cp.read_string("[experiment]\n" + text)
    kw = {}
    for key, raw in cp["experiment"].items():
        if key not in _PARSERS:
            raise ValueError(f"unknown config key {key!r}")
        val = _PARSERS[key](raw)
        kw["datasets" if key == "dataset" else key] = val
    if "datasets" in kw:
        kw["datasets"] = tuple(d if d.startswith("pa:") or os.path.isabs(d) else os.path.join(base_dir, d)
                               for d in kw["datasets"])
    return ExperimentConfig(**kw)


def load_config(path: str) -> ExperimentConfig:
    with open(path) as fh:
        return parse_config(fh.read(), os.path.dirname(os.path.abspath(path)))


# running --------------------------------------------------------------------

@dataclass
class RunRecord:
    dataset: str
    method: str
    rep: int
    seed: int
    d_alpha: float = 0.0
    edge_budget: int | None = None
    n_nodes: int = 0
    n_edges: int = 0
    dstats: dict = field(default_factory=dict)
    dalpha: float = math.nan
    error: str = ""

    @property
    def ok(self) -> bool:
        return not self.error


class DatasetContext:
    """Original graph plus lazily computed hierarchy and property distributions."""

    def __init__(self, name: str, graph: Graph, config: ExperimentConfig):
        self.name = name
        self.graph = graph
        self.config = config
        self._hierarchy = None
        self._props = None

    @property
    def hierarchy(self):
        if self._hierarchy is None:
            self._hierarchy = extract_hierarchy(self.graph)
        return self._hierarchy

    @property
    def properties(self):
        if self._props is None:
            self._props = self.properties_of(self.graph)
        return self._props

    def properties_of(self, g: Graph) -> dict:
        c = self.config
        return graph_properties(g, c.svd_k, c.hop_mode, c.hop_sources)

    def evaluate(self, method: str, rep: int, seed: int, d_alpha: float = 0.0,
                 edge_budget: int | None = None) -> RunRecord:
        rec = RunRecord(self.name, method, rep, seed, d_alpha, edge_budget)
        try:
            needs_tree = method == "C+D" or method.startswith("CBased")
            s = run_method(self.graph, method, self.config.params(seed), d_alpha=d_alpha,
                           edge_budget=edge_budget, hierarchy=self.hierarchy if needs_tree else None)
            rec.n_nodes, rec.n_edges = s.n_nodes, s.n_edges
            rec.dstats = compare_properties(self.properties, self.properties_of(s.to_graph()))
            try:
                rec.dalpha = dpl_difference(self.graph, s)
            except ValueError:
                rec.dalpha = math.nan
        except Exception as exc:  # a failing method must not sink the whole table
            logger.warning("%s on %s (seed %d) failed: %s", method, self.name, seed, exc)
            rec.error = f"{type(exc).__name__}: {exc}"
        return rec


_WORKER_CTX: dict = {}


def _init_worker(contexts):
    _WORKER_CTX.clear()
    _WORKER_CTX.update(contexts)


def _run_job(job):
    name, method, rep, seed, d_alpha, budget = job
    return _WORKER_CTX[name].evaluate(method, rep, seed, d_alpha, budget)


def _execute(contexts: dict, jobs: list, workers: int) -> list:
    """Evaluate jobs, in parallel if ``workers > 1``; result order follows ``jobs``."""
    if workers <= 1 or len(jobs) <= 1:
        _init_worker(contexts)
        return [_run_job(j) for j in jobs]
    for ctx in contexts.values():  # compute shared state once, before pickling
        ctx.properties
        ctx.hierarchy
    with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=(contexts,)) as pool:
        return list(pool.map(_run_job, jobs))


class Experiment:
    """Holds loaded datasets and the run log for one configuration."""

    def __init__(self, config: ExperimentConfig, datasets: dict | None = None):
        self.config = config
        if datasets is None:
            datasets = dict(load_dataset(spec) for spec in config.datasets)
        if not datasets:
            raise ValueError("no datasets configured")
        self.contexts = {name: DatasetContext(name, g, config) for name, g in datasets.items()}
        self.records: list[RunRecord] = []

    def run(self, methods, d_alphas=(0.0,)) -> list[RunRecord]:
        """Every (dataset, method, repetition, d_alpha) combination; returns the new records."""
        c = self.config
        out = []
        edge_methods = [m for m in methods if is_edge_based(m)]
        matched = c.edge_budget_policy == "matched-to-cplusd" and edge_methods
        first = [m for m in methods if not (matched and is_edge_based(m))]
        if matched and "C+D" not in first:
            first.append("C+D")
        jobs = [(name, m, i, c.run_seed(i), float(da), None)
                for name in self.contexts for m in first for da in (d_alphas if m == "C+D" else (0.0,))
                for i in range(c.repetitions)]
        out.extend(_execute(self.contexts, jobs, c.workers))
        if matched:
            cd = {(r.dataset, r.rep): r.n_edges for r in out if r.method == "C+D" and r.d_alpha == 0.0 and r.ok}
            jobs = [(name, m, i, c.run_seed(i), 0.0, cd.get((name, i)))
                    for name in self.contexts for m in edge_methods for i in range(c.repetitions)]
            out.extend(_execute(self.contexts, jobs, c.workers))
            out = [r for r in out if r.method in methods]
        self.records.extend(out)
        return out


# tables ---------------------------------------------------------------------

@dataclass
class ReportTable:
    """Rows of per-method values with fixed column semantics, written as CSV."""

    name: str
    dataset: str
    columns: list
    rows: list  # list of dicts keyed by column name
    notes: list = field(default_factory=list)

    def column(self, col: str) -> np.ndarray:
        return np.array([r[col] for r in self.rows], dtype=np.float64)

    def row(self, key: str, col: str = "method") -> dict:
        for r in self.rows:
            if r[col] == key:
                return r
        raise KeyError(key)

    def to_csv(self, stream, provenance: list | None = None) -> None:
        for line in provenance or ():
            stream.write(f"# {line}\n")
        for note in self.notes:
            stream.write(f"# note: {note}\n")
        w = csv.writer(stream, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_fmt(r[c]) for c in self.columns])

    def to_string(self) -> str:
        buf = io.StringIO()
        self.to_csv(buf)
        return buf.getvalue()


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return "nan" if math.isnan(x) else f"{float(x):.6f}"
    return str(x)


def _rank(values) -> np.ndarray:
    """Competition ranks (1 = smallest, ties share the lower rank); NaN ranks as 0."""
    v = np.asarray(values, dtype=np.float64)
    out = np.zeros(len(v), dtype=np.int64)
    ok = ~np.isnan(v)
    if ok.any():
        out[ok] = rankdata(v[ok], method="min").astype(np.int64)
    return out


def _mean_dstats(records, methods) -> tuple[np.ndarray, list]:
    """Mean D per (method, property) over successful runs, and ok-run counts."""
    M = np.full((len(methods), len(KINDS)), np.nan)
    counts = []
    for i, m in enumerate(methods):
        rs = [r for r in records if r.method == m and r.ok]
        counts.append(len(rs))
        if rs:
            M[i] = [np.mean([r.dstats[k] for r in rs]) for k in KINDS]
    return M, counts


def dstat_table(name: str, dataset: str, labels, M: np.ndarray, counts, label_col: str = "method",
                normalized: bool = True) -> ReportTable:
    """Per-property values with ranks, average with rank, and min-max normalized average with rank."""
    cols = [label_col]
    for k in KINDS:
        cols += [COLUMN_NAMES[k], f"{COLUMN_NAMES[k]}_R"]
    cols += ["Avg", "Avg_R"]
    if normalized:
        cols += ["AvgNorm", "AvgNorm_R"]
    cols += ["runs_ok"]
    avg = M.mean(axis=1)
    norm = minmax_normalize(M).mean(axis=1) if len(M) > 1 else np.zeros(len(M))
    ranks = [_rank(M[:, j]) for j in range(len(KINDS))]
    avg_rank, norm_rank = _rank(avg), _rank(norm)
    rows = []
    for i, lab in enumerate(labels):
        row = {label_col: lab}
        for j, k in enumerate(KINDS):
            row[COLUMN_NAMES[k]] = M[i, j]
            row[f"{COLUMN_NAMES[k]}_R"] = int(ranks[j][i])
        row["Avg"], row["Avg_R"] = avg[i], int(avg_rank[i])
        if normalized:
            row["AvgNorm"], row["AvgNorm_R"] = norm[i], int(norm_rank[i])
        row["runs_ok"] = counts[i]
        rows.append(row)
    return ReportTable(name, dataset, cols, rows)


def _with_mean(tables: list, builder) -> list:
    """Append an unweighted cross-dataset mean table when several datasets were run."""
    if len(tables) < 2:
        return tables
    labels = [r[tables[0].columns[0]] for r in tables[0].rows]
    cube = np.stack([np.array([[r[COLUMN_NAMES[k]] for k in KINDS] for r in t.rows]) for t in tables])
    counts = [int(sum(t.rows[i]["runs_ok"] for t in tables)) for i in range(len(labels))]
    mean = builder(labels, np.nanmean(cube, axis=0), counts)
    mean.notes.append("unweighted mean over datasets: " + ", ".join(t.dataset for t in tables))
    return tables + [mean]


def _methods(config: ExperimentConfig, default) -> tuple:
    if not config.methods:
        return tuple(default)
    return tuple(m for m in config.methods if m in default) or tuple(default)


def run_comparison(config: ExperimentConfig, experiment: Experiment | None = None) -> dict:
    """Mean D-statistics per property, with ranks and normalized averages.

    Node-sized and edge-sized methods go in separate tables, each including
    C+D. Returns ``{"node": [tables...], "edge": [tables...]}`` with one
    table per dataset plus a cross-dataset mean when there are several.
    """
    exp = experiment or Experiment(config)
    node_methods = _methods(config, NODE_TABLE)
    edge_methods = _methods(config, EDGE_TABLE)
    wanted = tuple(dict.fromkeys(node_methods + edge_methods))
    records = exp.run(wanted)
    out = {}
    for group, methods in (("node", node_methods), ("edge", edge_methods)):
        tables = []
        for ds in exp.contexts:
            M, counts = _mean_dstats([r for r in records if r.dataset == ds], methods)
            tables.append(dstat_table(f"compare-{group}", ds, methods, M, counts))
        out[group] = _with_mean(tables, lambda labels, M, counts, g=group:
                                dstat_table(f"compare-{g}", "mean", labels, M, counts))
    return out


def run_consistency(config: ExperimentConfig, experiment: Experiment | None = None) -> list:
    """Sample standard deviation of each D-statistic across repetitions."""
    if config.repetitions < 2:
        raise ValueError("consistency needs at least two repetitions")
    exp = experiment or Experiment(config)
    methods = _methods(config, ALL_METHODS)
    records = exp.run(methods)
    tables = []
    for ds in exp.contexts:
        S = np.full((len(methods), len(KINDS)), np.nan)
        counts = []
        for i, m in enumerate(methods):
            rs = [r for r in records if r.dataset == ds and r.method == m and r.ok]
            counts.append(len(rs))
            if len(rs) >= 2:
                S[i] = [consistency_stddev([r.dstats[k] for r in rs]) for k in KINDS]
        tables.append(dstat_table("consistency", ds, methods, S, counts, normalized=False))
    return _with_mean(tables, lambda labels, M, counts:
                      dstat_table("consistency", "mean", labels, M, counts, normalized=False))


def run_dpl_table(config: ExperimentConfig, experiment: Experiment | None = None) -> list:
    """Mean signed densification-exponent difference (sample minus original) per method."""
    exp = experiment or Experiment(config)
    methods = _methods(config, ALL_METHODS)
    records = exp.run(methods)
    tables = []
    per_ds = []
    for ds in exp.contexts:
        rows = []
        vals = []
        for m in methods:
            d = [r.dalpha for r in records if r.dataset == ds and r.method == m and r.ok and not math.isnan(r.dalpha)]
            mean = float(np.mean(d)) if d else math.nan
            vals.append(mean)
            rows.append({"method": m, "difference": mean,
                         "abs_R": 0, "runs_ok": len(d)})
        for row, rk in zip(rows, _rank(np.abs(vals))):
            row["abs_R"] = int(rk)
        per_ds.append(vals)
        tables.append(ReportTable("dpl", ds, ["method", "difference", "abs_R", "runs_ok"], rows))
    if len(tables) > 1:
        mean = np.nanmean(np.array(per_ds), axis=0)
        rows = [{"method": m, "difference": v, "abs_R": int(rk),
                 "runs_ok": sum(t.rows[i]["runs_ok"] for t in tables)}
                for i, (m, v, rk) in enumerate(zip(methods, mean, _rank(np.abs(mean))))]
        tables.append(ReportTable("dpl", "mean", ["method", "difference", "abs_R", "runs_ok"], rows,
                                  ["unweighted mean over datasets"]))
    return tables


def run_alpha_sweep(config: ExperimentConfig, experiment: Experiment | None = None) -> list:
    """C+D with every exponent offset in ``config.d_alpha``; rows are offsets, ranked by Avg."""
    exp = experiment or Experiment(config)
    offsets = tuple(float(x) + 0.0 for x in config.d_alpha)
    records = exp.run(("C+D",), offsets)
    tables = []
    for ds in exp.contexts:
        M = np.full((len(offsets), len(KINDS)), np.nan)
        counts, edges = [], []
        for i, da in enumerate(offsets):
            rs = [r for r in records if r.dataset == ds and r.d_alpha == da and r.ok]
            counts.append(len(rs))
            edges.append(float(np.mean([r.n_edges for r in rs])) if rs else math.nan)
            if rs:
                M[i] = [np.mean([r.dstats[k] for r in rs]) for k in KINDS]
        t = dstat_table("alpha-sweep", ds, [f"{da:g}" for da in offsets], M, counts, label_col="d_alpha",
                        normalized=False)
        t.columns.append("mean_edges")
        for row, e in zip(t.rows, edges):
            row["mean_edges"] = e
        tables.append(t)
    if len(tables) > 1:
        base = _with_mean(tables, lambda labels, M, counts: dstat_table(
            "alpha-sweep", "mean", labels, M, counts, label_col="d_alpha", normalized=False))
        tables = base
    return tables


def run_hybrid_comparison(config: ExperimentConfig, experiment: Experiment | None = None) -> list:
    """Each base method next to its wrapped version, one table per wrapper.

    ``hybrid-community`` pairs ``RN`` with ``CBasedRN`` and so on;
    ``hybrid-dpl`` does the same for the ``DBased`` wrappers. Base runs are
    shared between the two.
    """
    exp = experiment or Experiment(config)
    bases = _methods(config, HYBRID_BASES)
    prefixes = {"community": "CBased", "dpl": "DBased"}
    wanted = list(bases)
    for w in config.wrappers:
        wanted += [prefixes[w] + b for b in bases]
    records = exp.run(tuple(wanted))
    out = []
    for w in config.wrappers:
        methods = [m for b in bases for m in (b, prefixes[w] + b)]
        name = f"hybrid-{w}"
        tables = []
        for ds in exp.contexts:
            M, counts = _mean_dstats([r for r in records if r.dataset == ds], methods)
            tables.append(_strip_ranks(dstat_table(name, ds, methods, M, counts, normalized=False)))
        out += _with_mean(tables, lambda labels, M, counts, name=name: _strip_ranks(
            dstat_table(name, "mean", labels, M, counts, normalized=False)))
    return out


def _strip_ranks(t: ReportTable) -> ReportTable:
    t.columns = [c for c in t.columns if not c.endswith("_R")]
    return t


# output ---------------------------------------------------------------------

def provenance(config: ExperimentConfig, table: ReportTable) -> list:
    return [f"cdsample {__version__}", f"table={table.name} dataset={table.dataset}",
            f"config_sha256={config.digest()} seed={config.seed} repetitions={config.repetitions} "
            f"fraction={config.fraction}"]


def _safe(s: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.+-]", "_", s)


def write_tables(config: ExperimentConfig, tables, out_dir: str, experiment: Experiment | None = None) -> list:
    """Write each table to ``<out_dir>/<name>_<dataset>.csv`` plus ``runs.csv``; returns the paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for t in tables:
        path = os.path.join(out_dir, f"{_safe(t.name)}_{_safe(t.dataset)}.csv")
        with open(path, "w", newline="") as fh:
            t.to_csv(fh, provenance(config, t))
        paths.append(path)
    if experiment is not None:
        path = os.path.join(out_dir, "runs.csv")
        with open(path, "w", newline="") as fh:
            write_runs(experiment.records, fh, config)
        paths.append(path)
    return paths


def write_runs(records, stream, config: ExperimentConfig | None = None) -> None:
    """Per-run log: dataset, method, repetition, seed and every measured value."""
    if config is not None:
        stream.write(f"# cdsample {__version__} config_sha256={config.digest()}\n")
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["dataset", "method", "rep", "seed", "d_alpha", "edge_budget", "n_nodes", "n_edges",
                *KINDS, "dalpha", "error"])
    for r in records:
        w.writerow([r.dataset, r.method, r.rep, r.seed, _fmt(float(r.d_alpha)),
                    "" if r.edge_budget is None else r.edge_budget, r.n_nodes, r.n_edges,
                    *(_fmt(float(r.dstats.get(k, math.nan))) for k in KINDS), _fmt(float(r.dalpha)), r.error])
