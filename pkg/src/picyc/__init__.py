"""picyc: reference-free SNP discovery by parallel cycle search in colored de Bruijn graphs."""

__version__ = "0.1.0"

from .cycles import Cycle, SearchParams, canonicalize_cycle, search_cycles
from .graph import ColoredGraph, GraphNode, build_graph, load_graph, save_graph
from .index import (
    BranchingIndex,
    IndexShard,
    build_index,
    load_index,
    partition_for_workers,
    save_index,
    select_fraction,
    shard_index,
)
from .neighborhood import Subgraph, branching_vertices, complexity, graph_neighborhood
from .search import SearchStats, parallel_search
from .variants import (
    Bubble,
    PathCoverage,
    SnpCall,
    decompose,
    extract_coverage,
    filter_bubbles,
    mismatches,
    predict_snps,
    write_fasta,
    write_variants,
)

__all__ = [
    "Bubble",
    "BranchingIndex",
    "ColoredGraph",
    "Cycle",
    "GraphNode",
    "IndexShard",
    "PathCoverage",
    "SearchParams",
    "SearchStats",
    "SnpCall",
    "Subgraph",
    "branching_vertices",
    "build_graph",
    "build_index",
    "canonicalize_cycle",
    "complexity",
    "decompose",
    "extract_coverage",
    "filter_bubbles",
    "graph_neighborhood",
    "load_graph",
    "load_index",
    "mismatches",
    "parallel_search",
    "partition_for_workers",
    "predict_snps",
    "save_graph",
    "save_index",
    "search_cycles",
    "select_fraction",
    "shard_index",
    "write_fasta",
    "write_variants",
]
