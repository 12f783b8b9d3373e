"""Hub covering problems: models, exact solvers, approximations and reductions."""

from hubcover.approx import (
    approx_bounded_enumeration,
    approx_taskwise,
    greedy_set_cover,
    harmonic,
    solve_variant3_greedy,
)
from hubcover.exact import (
    Limits,
    OptimalResult,
    Status,
    feasible_with_hubs,
    per_task_best_pair,
    solve_exact,
)
from hubcover.feasibility import (
    Family,
    VerificationReport,
    tour_feasible,
    tour_length,
    verify_solution,
)
from hubcover.formats import parse_instance, parse_solution, serialize_instance, serialize_solution
from hubcover.model import (
    AdjacencyGraph,
    Allocation,
    CoverWitness,
    HcpInstance,
    MetricMatrix,
    MultiWitness,
    QueensInstance,
    SetCoverInstance,
    SetCoverSolution,
    SingleWitness,
    Solution,
    Tour,
    Variant,
    build_instance,
    make_solution,
)
from hubcover.reductions import (
    ReductionRecord,
    lift_solution,
    queens_to_sa2,
    reduce_v2_to_v1,
    reduce_v3_to_v2,
    setcover_to_v3,
    solve_queens_completion,
    v3_to_setcover,
)

__version__ = "0.1.0"

__all__ = [
    "AdjacencyGraph",
    "Allocation",
    "approx_bounded_enumeration",
    "approx_taskwise",
    "build_instance",
    "CoverWitness",
    "Family",
    "feasible_with_hubs",
    "greedy_set_cover",
    "harmonic",
    "HcpInstance",
    "lift_solution",
    "Limits",
    "make_solution",
    "MetricMatrix",
    "MultiWitness",
    "OptimalResult",
    "parse_instance",
    "parse_solution",
    "per_task_best_pair",
    "queens_to_sa2",
    "QueensInstance",
    "reduce_v2_to_v1",
    "reduce_v3_to_v2",
    "ReductionRecord",
    "serialize_instance",
    "serialize_solution",
    "setcover_to_v3",
    "SetCoverInstance",
    "SetCoverSolution",
    "SingleWitness",
    "Solution",
    "solve_exact",
    "solve_queens_completion",
    "solve_variant3_greedy",
    "Status",
    "Tour",
    "tour_feasible",
    "tour_length",
    "v3_to_setcover",
    "Variant",
    "VerificationReport",
    "verify_solution",
]
