"""End-to-end planning: NSGA-II Pareto search followed by ideal-point selection."""

from __future__ import annotations

from dataclasses import dataclass

from .cost import CostBreakdown, cost_breakdown
from .nsga2 import GaConfig, Individual, ParetoSet, evolve
from .problem import ProblemInstance
from .topsis import select_best


@dataclass(frozen=True)
class Plan:
    chosen: Individual
    breakdown: CostBreakdown
    pareto: ParetoSet
    config: GaConfig
    normalization: str = "vector"

    @property
    def l1(self) -> int:
        return self.chosen.l1

    @property
    def l2(self) -> int:
        return self.chosen.candidate.l2


def plan_split(
    instance: ProblemInstance, config: GaConfig = GaConfig(), normalization: str = "vector"
) -> Plan:
    """Raises NoFeasibleSolution when no Pareto member fits the memory cap."""
    pareto = evolve(instance, config)
    chosen = select_best(pareto, instance, normalization)
    return Plan(chosen, cost_breakdown(instance, chosen.l1), pareto, config, normalization)
