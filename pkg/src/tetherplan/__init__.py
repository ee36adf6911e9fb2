"""Motion planning for a tethered robot on a truncated universal cover of the
free workspace."""

from .cover import CoverComplex, build_complex, lift_path, preimage, project, shortest_in_cover
from .environment import Environment, ValidatedEnvironment, load_environment, validate
from .errors import TetherPlanError
from .planner import PlanQuery, PlanResult, SearchMode, plan, rank_homotopy_classes, resulting_tether
from .triangulation import dual_graph, funnel_shortest, sleeve_between, triangulate

__all__ = [
    "CoverComplex",
    "Environment",
    "PlanQuery",
    "PlanResult",
    "SearchMode",
    "TetherPlanError",
    "ValidatedEnvironment",
    "build_complex",
    "dual_graph",
    "funnel_shortest",
    "lift_path",
    "load_environment",
    "plan",
    "preimage",
    "project",
    "rank_homotopy_classes",
    "resulting_tether",
    "shortest_in_cover",
    "sleeve_between",
    "triangulate",
    "validate",
]
