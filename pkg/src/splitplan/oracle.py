"""Brute-force ground truth over every split index.

The split space has at most a few dozen points, so the exact Pareto set is
cheap to compute by pairwise comparison. Dominance here is plain Python,
deliberately separate from the vectorised code in :mod:`splitplan.nsga2`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import InvalidInstance, NoFeasibleSolution
from .nsga2 import Individual, ParetoSet
from .problem import ObjectiveVector, ProblemInstance, SplitCandidate, evaluate, is_feasible
from .topsis import select_best


@dataclass(frozen=True)
class Entry:
    candidate: SplitCandidate
    objectives: ObjectiveVector
    feasible: bool

    @property
    def l1(self) -> int:
        return self.candidate.l1


def _dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    better = False
    for x, y in zip(a, b):
        if x > y:
            return False
        if x < y:
            better = True
    return better


def enumerate_splits(instance: ProblemInstance) -> list[Entry]:
    """Evaluate every split ``l1`` in ``[1, L-1]``, in order."""
    if instance.total_layers < 2:
        raise InvalidInstance("model needs at least 2 layers")
    entries = []
    for l1 in range(1, instance.total_layers):
        candidate = instance.candidate(l1)
        entries.append(Entry(candidate, evaluate(instance, candidate), is_feasible(instance, l1)))
    return entries


def pareto_entries(entries: Sequence[Entry]) -> list[Entry]:
    """Entries no other entry dominates."""
    return [
        e for e in entries if not any(_dominates(o.objectives, e.objectives) for o in entries if o is not e)
    ]


def brute_force_fronts(objectives: Sequence[Sequence[float]]) -> list[list[int]]:
    """Front index of each point by exhaustive pairwise comparison, O(n^2 m).

    A point's front is one more than the deepest front among the points that
    dominate it (0 when undominated). A dominator always precedes the point
    it dominates in lexicographic order, so one pass in that order settles
    every dominator first.
    """
    points = [tuple(map(float, p)) for p in objectives]
    n = len(points)
    dominators = [[j for j in range(n) if _dominates(points[j], points[i])] for i in range(n)]
    level = [0] * n
    for i in sorted(range(n), key=points.__getitem__):
        if dominators[i]:
            level[i] = 1 + max(level[j] for j in dominators[i])
    fronts: list[list[int]] = [[] for _ in range(max(level, default=-1) + 1)]
    for i in range(n):
        fronts[level[i]].append(i)
    return fronts


def true_pareto_set(instance: ProblemInstance) -> ParetoSet:
    """Exact first front over all split indices, feasibility-tagged.

    A split over the memory cap always holds more memory than any split
    under it, so it can never dominate a feasible one: the feasible members
    here are exactly the Pareto set of the feasible region.
    """
    members = tuple(
        Individual(candidate=e.candidate, objectives=e.objectives, rank=0, crowding=0.0, feasible=e.feasible)
        for e in pareto_entries(enumerate_splits(instance))
    )
    return ParetoSet(members)


def true_selection(instance: ProblemInstance, normalization: str = "vector") -> tuple[ParetoSet, Individual]:
    pareto = true_pareto_set(instance)
    if not any(m.feasible for m in pareto):
        raise NoFeasibleSolution("no split satisfies the memory cap")
    return pareto, select_best(pareto, instance, normalization)
