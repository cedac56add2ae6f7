"""
Comparing samplers on one graph
===============================

Draw a 10% sample with every baseline method plus C+D, and print the
K-S distance on each property. Lower is better.

Run with ``python3 demos/compare_samplers.py``.
"""

import numpy as np

from cdsample import SamplerParams, extract_hierarchy, graph_properties
from cdsample.harness import ALL_METHODS, preferential_attachment, run_method
from cdsample.metrics import compare_properties, dpl_difference

g = preferential_attachment(2000, 4, seed=1)
ref = graph_properties(g)
hier = extract_hierarchy(g)  # reused by C+D and the community wrappers

methods = ALL_METHODS + ("CBasedRN", "CBasedRW", "DBasedRW")
print(f"{'method':10s} {'nodes':>6s} {'edges':>6s}  degree   sval   svec     cc    hop    avg  dalpha")
for tag in methods:
    s = run_method(g, tag, SamplerParams(fraction=0.1, rng_seed=7), hierarchy=hier)
    d = compare_properties(ref, graph_properties(s.to_graph()))
    vals = list(d.values())
    print(f"{tag:10s} {s.n_nodes:6d} {s.n_edges:6d}  " + " ".join(f"{v:6.3f}" for v in vals)
          + f" {np.mean(vals):6.3f} {dpl_difference(g, s):+.3f}")

# Edge samplers (RE, RNE) draw a tenth of the edges rather than of the
# nodes, so their node counts are not comparable to the rest.
