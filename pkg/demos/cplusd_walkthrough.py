"""
Walking through a C+D sample
============================

Build a scale-free graph, find its community hierarchy, look at the
per-community budgets, draw a 10% sample and check how close its five
structural properties are to the original.

Run with ``python3 demos/cplusd_walkthrough.py``.
"""

import sys

import numpy as np

from cdsample import densification_exponent, extract_hierarchy, graph_properties, modularity, sample_cplusd
from cdsample.cplusd import write_shortfall_report
from cdsample.harness import preferential_attachment
from cdsample.metrics import compare_properties, dpl_difference

# a 2,000-node preferential-attachment graph, 4 edges per new node
g = preferential_attachment(2000, 4, seed=0)
print(f"graph: {g.node_count} nodes, {g.n_edges} edges")
print(f"whole-graph exponent: {densification_exponent(g.node_count, g.n_edges):.4f}")

###############################################################################
# Community hierarchy
# -------------------
# Greedy modularity merging stops at the best cut; the remaining merges
# still form a binary tree over the communities.

partition, dend = extract_hierarchy(g)
sizes = np.array([leaf.n_nodes for leaf in dend.leaves])
print(f"\n{dend.n_leaves} communities, Q = {modularity(g, partition):.4f}")
print("largest community sizes:", np.sort(sizes)[::-1][:8].tolist())

###############################################################################
# Sampling
# --------
# Each community gets its share of the node budget and an edge budget
# from its own exponent; merges add the cross-community edges.

s = sample_cplusd(g, fraction=0.1, rng_seed=42, hierarchy=(partition, dend))
b = s.meta["budgets"]
print(f"\nsample: {s.n_nodes} nodes, {s.n_edges} edges "
      f"(budget {s.meta['edge_budget_total']}, shortfall {s.meta['shortfall_edges']})")
for leaf in dend.leaves[:5]:
    print(f"  community {leaf.id}: {leaf.n_nodes:4d} nodes -> budget "
          f"{b.node_budget[leaf.id]:3d} nodes / {b.edge_budget[leaf.id]:3d} edges")

# pass -v to print the full per-leaf and per-merge shortfall CSV
if "-v" in sys.argv:
    write_shortfall_report(s, sys.stdout)

###############################################################################
# How good is it?
# ---------------
# K-S distance per property (0 means identical distributions) and the
# change in densification exponent.

d = compare_properties(graph_properties(g), graph_properties(s.to_graph()))
for kind, v in d.items():
    print(f"  {kind:6s} D = {v:.3f}")
print(f"  average D = {np.mean(list(d.values())):.3f}")
print(f"  delta alpha = {dpl_difference(g, s):+.4f}")
