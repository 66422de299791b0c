"""Compatibility of unrooted phylogenetic trees through legal triangulations."""

from .chordal import (
    CliqueTree,
    Graph,
    TreeDecomposition,
    Triangulation,
    build_clique_tree,
    is_chordal,
    maximal_cliques,
    triangulation_from_decomposition,
    validate_decomposition,
    width,
)
from .compatibility import (
    CompatReport,
    brute_force_compatible,
    decide,
    enumerate_binary_topologies,
    random_profile,
)
from .display_graph import DisplayGraph, build_display_graph
from .errors import ExtractionError, InputError, InstanceTooLarge, PreconditionError
from .extraction import ExtractionResult, extract_supertree, normalize_supertree
from .legal import (
    LegalityReport,
    check_concise,
    check_legal,
    decomposition_from_supertree,
    make_concise,
    search_legal_triangulation,
)
from .newick import parse_profile, parse_tree, write_tree
from .trees import (
    EmbeddingFunction,
    PhyloTree,
    Profile,
    compute_embedding,
    contract_edge,
    displays,
    isomorphic,
    restrict,
    verify_embedding,
)

__all__ = [
    "CliqueTree",
    "Graph",
    "TreeDecomposition",
    "Triangulation",
    "build_clique_tree",
    "is_chordal",
    "maximal_cliques",
    "triangulation_from_decomposition",
    "validate_decomposition",
    "width",
    "CompatReport",
    "brute_force_compatible",
    "decide",
    "enumerate_binary_topologies",
    "random_profile",
    "DisplayGraph",
    "build_display_graph",
    "ExtractionError",
    "InputError",
    "InstanceTooLarge",
    "PreconditionError",
    "ExtractionResult",
    "extract_supertree",
    "normalize_supertree",
    "LegalityReport",
    "check_concise",
    "check_legal",
    "decomposition_from_supertree",
    "make_concise",
    "search_legal_triangulation",
    "parse_profile",
    "parse_tree",
    "write_tree",
    "EmbeddingFunction",
    "PhyloTree",
    "Profile",
    "compute_embedding",
    "contract_edge",
    "displays",
    "isomorphic",
    "restrict",
    "verify_embedding",
]

__version__ = "0.1.0"
