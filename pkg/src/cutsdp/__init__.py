"""Certified lower bounds and heuristic upper bounds for the minimum cutwidth
of a graph, via a cutting-plane-strengthened semidefinite relaxation."""

from .graph import (
    Graph,
    ParseError,
    SizeLimitError,
    degree_lower_bound,
    format_edge_list,
    gen_erdos_renyi,
    gen_random_geometric,
    load_edge_list,
)
from .lower_bound import (
    BoundReport,
    DriverParams,
    compute_lower_bound,
    families_for_iteration,
    prune_cuts,
)
from .ordering import (
    LOVector,
    Permutation,
    cutwidth_of_ordering,
    cutwidth_of_vertex,
    encode_lo,
    exact_cutwidth_bruteforce,
    exact_cutwidth_subset_dp,
    pair_index,
)
from .sdp_model import (
    LinearConstraint,
    SdpProblem,
    build_basic_relaxation,
    evaluate_constraint,
)
from .sdp_solver import SdpSolution, SolverSettings, project_psd, residuals, solve
from .separation import SaParams, separate_batch, separate_one
from .upper_bound import compute_upper_bound, improve_sa, round_to_ordering

__version__ = "0.1.0"

__all__ = [
    "Graph", "ParseError", "SizeLimitError", "degree_lower_bound",
    "format_edge_list", "gen_erdos_renyi", "gen_random_geometric",
    "load_edge_list", "BoundReport", "DriverParams", "compute_lower_bound",
    "families_for_iteration", "prune_cuts", "LOVector", "Permutation",
    "cutwidth_of_ordering", "cutwidth_of_vertex", "encode_lo",
    "exact_cutwidth_bruteforce", "exact_cutwidth_subset_dp", "pair_index",
    "LinearConstraint", "SdpProblem", "build_basic_relaxation",
    "evaluate_constraint", "SdpSolution", "SolverSettings", "project_psd",
    "residuals", "solve", "SaParams", "separate_batch", "separate_one",
    "compute_upper_bound", "improve_sa", "round_to_ordering",
]
