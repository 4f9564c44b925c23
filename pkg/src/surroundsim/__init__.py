"""Distributed surrounding of planar convex targets.

Agents in the plane, modeled as complex scalars, coordinate through a
complex-weighted communication graph to take positions around a convex
target set at equal distance and prescribed relative projection angles.
The package simulates these dynamics under switching communication,
classifies cycle consistency of the weight pattern, builds the gauge
transforms that reduce consistent graphs to real Laplacians, and checks
the resulting convergence predictions numerically.
"""

__version__ = "0.1.0"

from .dynamics import (
    MonitorReport,
    Outcome,
    Trajectory,
    TrajectorySample,
    build_laplacian,
    classify_outcome,
    conserved_quantity,
    control_input,
    integrate,
    lyapunov_d,
    summarize,
    surrounding_error,
)
from .errors import SurroundsimError
from .geometry import Ball, ConvexBody, Polygon, Singleton, distance, project, sup_modulus, support_point
from .oracle import (
    CycleInventory,
    PointLimit,
    TheoremVerdict,
    alpha_weights,
    brute_force_cycles,
    lemma3_singularity,
    point_target_limit,
    remark6_bound,
    theorem1_construct,
    theorem3_condition,
    theorem4_condition,
)
from .scenario import Scenario, load_scenario, save_scenario, undirected_variant
from .topology import (
    Arc,
    ConfigurationGraph,
    Consistency,
    GaugePotentials,
    Segment,
    SwitchingSchedule,
    classify_consistency,
    cycle_holonomy,
    gauge_potentials,
    is_strongly_connected,
    union_graph,
    verify_ujsc,
)

__all__ = [
    "__version__",
    "Arc",
    "Ball",
    "ConfigurationGraph",
    "Consistency",
    "ConvexBody",
    "CycleInventory",
    "GaugePotentials",
    "MonitorReport",
    "Outcome",
    "PointLimit",
    "Polygon",
    "Scenario",
    "Segment",
    "Singleton",
    "SurroundsimError",
    "SwitchingSchedule",
    "TheoremVerdict",
    "Trajectory",
    "TrajectorySample",
    "alpha_weights",
    "brute_force_cycles",
    "build_laplacian",
    "classify_consistency",
    "classify_outcome",
    "conserved_quantity",
    "control_input",
    "cycle_holonomy",
    "distance",
    "gauge_potentials",
    "integrate",
    "is_strongly_connected",
    "lemma3_singularity",
    "load_scenario",
    "lyapunov_d",
    "point_target_limit",
    "project",
    "remark6_bound",
    "save_scenario",
    "summarize",
    "sup_modulus",
    "support_point",
    "surrounding_error",
    "theorem1_construct",
    "theorem3_condition",
    "theorem4_condition",
    "undirected_variant",
    "union_graph",
    "verify_ujsc",
]
