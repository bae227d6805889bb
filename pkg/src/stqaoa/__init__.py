"""Tree-based variational circuits for SIGNED MAXCUT, with classical baselines."""

__version__ = "0.1.0"

from .signed_graph import (  # noqa: E402
    Cut,
    DirectedSpanningTree,
    SignedGraph,
    bfs_tree,
    cut_value,
    is_balanced,
    random_regular_graph,
    random_spanning_tree,
    read_graph,
    tree_from_cut,
    write_graph,
)
from .classical_solvers import GwConfig, SolverResult, solve_brute_force, solve_gw, solve_gw_best_of, solve_random_tree  # noqa: E402
from .quantum_sim import (  # noqa: E402
    Circuit,
    StateVector,
    build_exact_st_circuit,
    build_qaoa_circuit,
    build_st_qaoa_circuit,
    build_vst_circuit,
    evaluate,
    simulate,
)
from .vst_classical import vst_objective, vst_sample, vst_zz_expectation  # noqa: E402
from .optimizer import OptimizeConfig, optimize  # noqa: E402

__all__ = [
    "Circuit",
    "Cut",
    "DirectedSpanningTree",
    "GwConfig",
    "OptimizeConfig",
    "SignedGraph",
    "SolverResult",
    "StateVector",
    "bfs_tree",
    "build_exact_st_circuit",
    "build_qaoa_circuit",
    "build_st_qaoa_circuit",
    "build_vst_circuit",
    "cut_value",
    "evaluate",
    "is_balanced",
    "optimize",
    "random_regular_graph",
    "random_spanning_tree",
    "read_graph",
    "simulate",
    "solve_brute_force",
    "solve_gw",
    "solve_gw_best_of",
    "solve_random_tree",
    "tree_from_cut",
    "vst_objective",
    "vst_sample",
    "vst_zz_expectation",
    "write_graph",
]
