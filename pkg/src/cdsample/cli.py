"""Command-line entry point: ``cdsample sample|metrics|compare|consistency|dpl-table|alpha-sweep|hybrid``."""

from __future__ import annotations

import argparse
import logging
import sys

from . import __version__
from .cplusd import write_shortfall_report
from .graph import load_edge_list
from .harness import (
    Experiment,
    load_config,
    run_alpha_sweep,
    run_comparison,
    run_consistency,
    run_dpl_table,
    run_hybrid_comparison,
    run_method,
    write_tables,
)
from .metrics import graph_properties
from .sample import SamplerParams


def _cmd_sample(args) -> None:
    g, ids = load_edge_list(args.input)
    method = args.method
    if args.induced and method in ("RW", "RJ", "FF"):
        method += "(i)"
    params = SamplerParams(fraction=args.fraction, induced=args.induced, rng_seed=args.seed)
    s = run_method(g, method, params, d_alpha=args.d_alpha, edge_budget=args.edge_budget)
    with open(args.output, "w") as fh:
        s.write(fh, ids)
    if s.method == "C+D":
        with open(args.output + ".shortfall.csv", "w") as fh:
            write_shortfall_report(s, fh)


def _cmd_metrics(args) -> None:
    g, _ = load_edge_list(args.input)
    props = graph_properties(g, args.svd_k, args.hop_mode, args.hop_sources)
    with open(args.output, "w") as fh:
        for d in props.values():
            d.write_csv(fh)


def _compare(config, exp):
    res = run_comparison(config, exp)
    return res["node"] + res["edge"]


_RUNNERS = {
    "compare": _compare,
    "consistency": run_consistency,
    "dpl-table": run_dpl_table,
    "alpha-sweep": run_alpha_sweep,
    "hybrid": run_hybrid_comparison,
}


def _cmd_experiment(args) -> None:
    config = load_config(args.config)
    exp = Experiment(config)
    tables = _RUNNERS[args.command](config, exp)
    for path in write_tables(config, tables, args.output_dir, exp):
        print(path)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cdsample", description=__doc__)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", help="draw one sample graph")
    s.add_argument("--input", required=True)
    s.add_argument("--method", required=True, help="C+D, RN, RDN, RPN, RE, RNE, RW, RJ, FF, CBased*, DBased*")
    s.add_argument("--fraction", type=float, default=0.1)
    s.add_argument("--d-alpha", type=float, default=0.0)
    s.add_argument("--induced", action="store_true")
    s.add_argument("--edge-budget", type=int, default=None)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--output", required=True)
    s.set_defaults(func=_cmd_sample)

    m = sub.add_parser("metrics", help="dump the five property distributions of a graph")
    m.add_argument("--input", required=True)
    m.add_argument("--svd-k", type=int, default=100)
    m.add_argument("--hop-mode", choices=("exact", "sampled", "auto"), default="auto")
    m.add_argument("--hop-sources", type=int, default=1000)
    m.add_argument("--output", required=True)
    m.set_defaults(func=_cmd_metrics)

    for name in _RUNNERS:
        e = sub.add_parser(name, help=f"run the {name} experiment")
        e.add_argument("--config", required=True)
        e.add_argument("--output-dir", required=True)
        e.set_defaults(func=_cmd_experiment)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except Exception as exc:
        print(f"cdsample: error: {exc}".splitlines()[0], file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
