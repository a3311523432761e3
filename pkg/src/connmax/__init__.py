"""Algebraic connectivity maximization for mobile multi-agent networks.

The library grows the second-smallest Laplacian eigenvalue of a
state-dependent communication graph by solving a linearized conic program
each time step, either centrally or through per-agent local programs whose
solutions are merged under feasibility-preserving scalings.
"""

from .adaptive import (
    AdaptivePolicy,
    SuboptimalityMeasures,
    UndefinedMeasureError,
    suboptimality,
    update_n,
)
from .distributed import (
    MergeWeights,
    NeighborhoodIndex,
    WorldState,
    algorithm1_step,
    build_neighborhoods,
    enlarged_neighborhood,
    local_rho,
    merge_step,
    merge_weights,
    scaled_local_params,
    solve_local,
)
from .dynamics import (
    AgentDynamics,
    InputPolytope,
    LiftedInput,
    LiftedState,
    collision_bound,
    check_collision_margin,
    invert_control,
    lift,
    polytope_vertices,
    step,
    substep,
    velocity_feasible_set,
)
from .graph import (
    Configuration,
    LinearizationCoeffs,
    WeightParams,
    WeightedGraphView,
    algebraic_connectivity,
    build_graph,
    delta_laplacian,
    linearize,
    shifted_matrix,
    weight,
    weight_derivative,
)
from .sdp import (
    ConicProgram,
    SolveOutcome,
    build_centralized_lti,
    build_centralized_si,
    build_local,
    solve,
)
from .sim import (
    CheckReport,
    RunResult,
    Scenario,
    StepLog,
    benchmark_scenario,
    check_scenario,
    init_line_benchmark,
    load_scenario,
    octagon_polytope,
    run,
    scenario_from_dict,
    write_artifacts,
)

__all__ = [
    "AdaptivePolicy",
    "AgentDynamics",
    "CheckReport",
    "ConicProgram",
    "Configuration",
    "InputPolytope",
    "LiftedInput",
    "LiftedState",
    "LinearizationCoeffs",
    "MergeWeights",
    "NeighborhoodIndex",
    "RunResult",
    "Scenario",
    "SolveOutcome",
    "StepLog",
    "SuboptimalityMeasures",
    "UndefinedMeasureError",
    "WeightParams",
    "WeightedGraphView",
    "WorldState",
    "algebraic_connectivity",
    "algorithm1_step",
    "benchmark_scenario",
    "build_centralized_lti",
    "build_centralized_si",
    "build_graph",
    "build_local",
    "build_neighborhoods",
    "check_collision_margin",
    "check_scenario",
    "collision_bound",
    "delta_laplacian",
    "enlarged_neighborhood",
    "init_line_benchmark",
    "invert_control",
    "lift",
    "linearize",
    "load_scenario",
    "local_rho",
    "merge_step",
    "merge_weights",
    "octagon_polytope",
    "polytope_vertices",
    "run",
    "scaled_local_params",
    "scenario_from_dict",
    "shifted_matrix",
    "solve",
    "solve_local",
    "step",
    "substep",
    "suboptimality",
    "update_n",
    "velocity_feasible_set",
    "weight",
    "weight_derivative",
    "write_artifacts",
]

__version__ = "0.1.0"
