"""Firmware module analysis toolkit.

Thin python surface over the C++ core: ARM ELF loading, call/data-reference
graph construction, Newman clustering, source normalization and the cluster
evaluation metrics.
"""

from fwmod._core import (  # noqa: F401
    BinaryImage,
    CallSite,
    DataRef,
    FunctionGraph,
    FunctionRecord,
    FwmodError,
    GraphWeights,
    Section,
    SymbolEntry,
    anonymize_identifiers,
    brute_force_best_partition,
    build_call_graph,
    build_data_reference_graph,
    build_name_address_map,
    build_sequence_graph,
    cluster_newman,
    combine,
    cosine_similarity,
    count_nonblank_lines,
    data_sections,
    extract_calls,
    extract_data_refs,
    filter_by_length,
    format_hours,
    load_elf,
    match_and_score,
    modularity,
    parse_ranking,
    recover_functions,
    select_top_k,
    strip_comments,
    weighted_metrics,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
