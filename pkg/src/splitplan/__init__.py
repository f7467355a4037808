"""Plan where to split a CNN between a phone and a server.

Minimises end-to-end latency, client energy and client memory together
with NSGA-II, then picks one split by distance to the ideal point.
"""

from .baselines import BaselineKind, BaselineResult, run_baseline
from .cost import CostBreakdown, DeviceProfile, NetworkProfile, cost_breakdown, energy_breakdown, latency_breakdown
from .errors import (
    IndexOutOfRange,
    InvalidInstance,
    InvalidMatrix,
    NoFeasibleSolution,
    ParseError,
    ShapeMismatch,
    SplitPlanError,
    ValidationError,
)
from .nsga2 import GaConfig, Individual, ParetoSet, crowding_distance, evolve, non_dominated_sort
from .oracle import enumerate_splits, true_selection
from .planner import Plan, plan_split
from .problem import ObjectiveVector, ProblemInstance, SplitCandidate, default_instance, evaluate, feasible
from .profile import LayerKind, LayerSpec, ModelProfile, TensorShape, bundled_profile, load_profile
from .topsis import normalize, select_best

__version__ = "0.1.0"
