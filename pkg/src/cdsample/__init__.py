"""Graph sampling for social networks: community + densification-power-law (C+D)
sampling, twelve baseline samplers, and a five-property K-S evaluation harness."""

__version__ = "0.1.0"

from .budget import allocate_budgets, densification_exponent, dpl_edge_target
from .community import Dendrogram, Partition, extract_hierarchy, modularity
from .cplusd import sample_cplusd
from .graph import Graph, NodeIdMap, degree_sequence, induced_subgraph, load_edge_list, write_edge_list
from .metrics import Distribution, graph_properties, ks_dstat
from .sample import SampleGraph, SamplerParams

__all__ = [
    "Dendrogram", "Distribution", "Graph", "NodeIdMap", "Partition", "SampleGraph", "SamplerParams",
    "allocate_budgets", "degree_sequence", "densification_exponent", "dpl_edge_target", "extract_hierarchy",
    "graph_properties", "induced_subgraph", "ks_dstat", "load_edge_list", "modularity", "sample_cplusd",
    "write_edge_list",
]
