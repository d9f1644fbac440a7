"""Exact integer-point counting, feasibility and optimisation over rational polyhedra."""

from .counting import INFINITE, CountReport, choose_direction, count_canonical, count_standard
from .errors import BudgetExceeded, LatcountError
from .genfun import ShortRatExpFun, cone_constant_term, cone_genfun, constant_term, todd_polynomials
from .hypergraph import HypergraphInstance, dominating_multiset
from .hypergraph import solve as solve_hypergraph
from .instances import InstanceFile, ParseError, parse_instance, write_instance
from .linalg import delta, hnf, snf, sparsity_stats
from .oracle import BoxSpec, oracle_count, oracle_optcount, oracle_optimize
from .polyhedron import CanonicalSystem, StandardSystem, enumerate_vertices, standard_to_canonical
from .solver import (FEASIBLE, INFEASIBLE, UNBOUNDED, SolveReport, feasible, optimize,
                     optimize_and_count, standard_dp_optimize)

__version__ = "0.1.0"

__all__ = [
    "INFINITE", "CountReport", "choose_direction", "count_canonical", "count_standard",
    "BudgetExceeded", "LatcountError",
    "ShortRatExpFun", "cone_constant_term", "cone_genfun", "constant_term", "todd_polynomials",
    "HypergraphInstance", "dominating_multiset", "solve_hypergraph",
    "InstanceFile", "ParseError", "parse_instance", "write_instance",
    "delta", "hnf", "snf", "sparsity_stats",
    "BoxSpec", "oracle_count", "oracle_optcount", "oracle_optimize",
    "CanonicalSystem", "StandardSystem", "enumerate_vertices", "standard_to_canonical",
    "FEASIBLE", "INFEASIBLE", "UNBOUNDED", "SolveReport", "feasible", "optimize",
    "optimize_and_count", "standard_dp_optimize",
]
