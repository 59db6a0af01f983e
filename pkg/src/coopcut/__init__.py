"""Minimum cooperative cut: minimum (s,t)-cut under a monotone submodular
edge-set cost, with surrogate solvers, polymatroidal flows, convex
relaxations, instance generators and a benchmark harness."""

__version__ = "0.1.0"

from .submodular import (  # noqa: F401
    SubmodularOracle, ModularCost, MaxWeightCost, ConcaveOfWeightCost,
    ScaledSumCost, lovasz_extension, greedy_vertex, curvature,
    check_submodular, check_monotone, check_normalized, sfm_bruteforce,
)
from .graph import (  # noqa: F401
    Graph, Cut, is_st_cut, prune_to_minimal, shortest_path,
    min_st_cut_modular, gomory_hu_cut_basis, enumerate_st_cuts,
    enumerate_st_paths,
)
from .instances import (  # noqa: F401
    Instance, KnownOptimum, make_instance, gen_grid, gen_clustered,
    gen_matrix_rank, gen_labels, gen_unstructured, gen_bestcut,
    gen_truncated_rank, gen_lowerbound_paths, gen_worstcase,
    gen_bisection_reduction, gen_greedy_adversarial, gen_convolution_witness,
    derangement_counts, f_bal, recommended_beta, save_instance, load_instance,
)
from .surrogate import (  # noqa: F401
    SolverReport, solve_mc, solve_mb, solve_queyranne, solve_ea,
    ea_lite_weights, supergradient_bound, solve_semigradient,
)
from .polyflow import (  # noqa: F401
    FlowState, max_polyflow, extract_min_cut, fhat_pmf, residual_capacity,
    solve_pf,
)
from .relax import (  # noqa: F401
    FractionalSolution, CoopFlowResult, solve_relaxation,
    solve_relaxation_exact, round_edge_threshold, round_distance,
    certificate_factor, max_coop_flow_small, flow_cut_gap_bounds,
    solve_cr, solve_db,
)
from .greedy import solve_greedy_random, solve_greedy_det  # noqa: F401
from .bench import bench, default_config, run_global, run_solver  # noqa: F401
from .rng import Rng  # noqa: F401
