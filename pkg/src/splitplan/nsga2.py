"""NSGA-II over a single bounded integer decision variable (the split index).

Randomness comes from numpy's PCG64 bit generator seeded with
``GaConfig.seed``; PCG64 streams are identical across platforms, so a run
is reproducible from ``(instance, config)`` alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InvalidInstance, ValidationError
from .problem import ObjectiveVector, ProblemInstance, SplitCandidate, evaluate, is_feasible

MUTATION_STEPS = np.array([-2, -1, 1, 2])


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 40
    generations: int = 50
    mutation_rate: float = 0.3
    crossover_rate: float = 0.9
    seed: int = 42

    def __post_init__(self):
        if self.population_size < 4 or self.population_size % 2:
            raise ValidationError(f"population_size must be even and >= 4, got {self.population_size}")
        if self.generations < 1:
            raise ValidationError(f"generations must be >= 1, got {self.generations}")
        for name in ("mutation_rate", "crossover_rate"):
            rate = getattr(self, name)
            if not 0.0 <= rate <= 1.0:
                raise ValidationError(f"{name} must lie in [0, 1], got {rate}")
        if not 0 <= self.seed < 2**64:
            raise ValidationError(f"seed must be a 64-bit unsigned int, got {self.seed}")


@dataclass
class Individual:
    candidate: SplitCandidate
    objectives: ObjectiveVector
    rank: int = 0
    crowding: float = 0.0
    feasible: bool = True

    @property
    def l1(self) -> int:
        return self.candidate.l1


@dataclass(frozen=True)
class ParetoSet:
    """Rank-0 individuals, one per split index, ordered by ``l1``."""

    members: tuple[Individual, ...] = field(default_factory=tuple)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @property
    def l1s(self) -> list[int]:
        return [m.l1 for m in self.members]

    def objective_matrix(self) -> np.ndarray:
        return np.array([m.objectives for m in self.members], dtype=float).reshape(-1, 3)

    def feasible_mask(self) -> np.ndarray:
        return np.array([m.feasible for m in self.members], dtype=bool)


def dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    """True when ``a`` is no worse than ``b`` everywhere and better somewhere."""
    return all(x <= y for x, y in zip(a, b)) and any(x < y for x, y in zip(a, b))


def dominance_matrix(objectives: np.ndarray) -> np.ndarray:
    """``D[i, j]`` is True when row ``i`` dominates row ``j``."""
    a = objectives[:, None, :]
    b = objectives[None, :, :]
    return np.all(a <= b, axis=2) & np.any(a < b, axis=2)


def fast_non_dominated_sort(objectives: np.ndarray) -> list[np.ndarray]:
    """Partition row indices into successive fronts, best first."""
    objectives = np.asarray(objectives, dtype=float)
    n = len(objectives)
    if n == 0:
        return []
    dom = dominance_matrix(objectives)
    counts = dom.sum(axis=0)
    fronts = []
    current = np.flatnonzero(counts == 0)
    while current.size:
        fronts.append(current)
        counts = counts - dom[current].sum(axis=0)
        counts[current] = -1
        current = np.flatnonzero(counts == 0)
    return fronts


def crowding_distances(objectives: np.ndarray) -> np.ndarray:
    """Normalised-gap crowding distance for every row of one front.

    Objectives whose values are all equal contribute nothing, boundary
    rows are infinitely far, and fronts of one or two rows are all boundary.
    """
    objectives = np.asarray(objectives, dtype=float)
    n = len(objectives)
    if n <= 2:
        return np.full(n, math.inf)
    distance = np.zeros(n)
    for column in objectives.T:
        order = np.argsort(column, kind="stable")
        ordered = column[order]
        span = ordered[-1] - ordered[0]
        if span == 0:
            continue
        distance[order[0]] = distance[order[-1]] = math.inf
        distance[order[1:-1]] += (ordered[2:] - ordered[:-2]) / span
    return distance


def non_dominated_sort(population: list[Individual]) -> list[list[Individual]]:
    """Group individuals into fronts and set each one's ``rank``."""
    objs = np.array([ind.objectives for ind in population], dtype=float).reshape(-1, 3)
    fronts = []
    for rank, members in enumerate(fast_non_dominated_sort(objs)):
        front = [population[i] for i in members]
        for ind in front:
            ind.rank = rank
        fronts.append(front)
    return fronts


def crowding_distance(front: list[Individual]) -> None:
    """Assign ``crowding`` to every individual of ``front`` in place."""
    objs = np.array([ind.objectives for ind in front], dtype=float).reshape(-1, 3)
    for ind, value in zip(front, crowding_distances(objs)):
        ind.crowding = float(value)


def _rank_and_crowd(objectives: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    ranks = np.empty(len(objectives), dtype=int)
    crowd = np.empty(len(objectives))
    for rank, members in enumerate(fast_non_dominated_sort(objectives)):
        ranks[members] = rank
        crowd[members] = crowding_distances(objectives[members])
    return ranks, crowd


class _ObjectiveCache:
    """Lazily evaluated objective table indexed by split index."""

    def __init__(self, instance: ProblemInstance):
        self.instance = instance
        self.table = np.full((instance.total_layers, 3), np.nan)
        self.known = np.zeros(instance.total_layers, dtype=bool)
        self.evaluations = 0

    def __call__(self, l1s: np.ndarray) -> np.ndarray:
        for l1 in np.unique(l1s[~self.known[l1s]]):
            self.table[l1] = evaluate(self.instance, self.instance.candidate(int(l1)))
            self.known[l1] = True
            self.evaluations += 1
        return self.table[l1s]


def _survive(
    merged: np.ndarray, size: int, objectives: Callable[[np.ndarray], np.ndarray]
) -> np.ndarray:
    """Elitist truncation of parents + offspring to ``size`` individuals.

    Selection runs over distinct split indices by rank, then descending
    crowding. Copies of already-chosen indices only fill places left over
    once every distinct index is in.
    """
    distinct, first = np.unique(merged, return_index=True)
    ranks, crowd = _rank_and_crowd(objectives(distinct))
    order = np.lexsort((-crowd, ranks))
    chosen = distinct[order[:size]]
    if len(chosen) == size:
        return chosen
    spare = np.delete(merged, first)
    priority = {int(v): i for i, v in enumerate(distinct[order])}
    spare = sorted(spare.tolist(), key=priority.__getitem__)
    return np.concatenate([chosen, np.array(spare[: size - len(chosen)], dtype=int)])


def _population_scores(pop: np.ndarray, objectives) -> tuple[np.ndarray, np.ndarray]:
    # rank and crowding come from the distinct indices; copies share them
    distinct, inverse = np.unique(pop, return_inverse=True)
    ranks, crowd = _rank_and_crowd(objectives(distinct))
    return ranks[inverse], crowd[inverse]


def _offspring(
    pop: np.ndarray,
    ranks: np.ndarray,
    crowd: np.ndarray,
    rng: np.random.Generator,
    config: GaConfig,
    low: int,
    high: int,
) -> np.ndarray:
    n = len(pop)
    # two binary tournaments per child
    entrants = rng.integers(0, n, size=(n, 2, 2))
    coin = rng.random((n, 2))
    a, b = entrants[..., 0], entrants[..., 1]
    a_wins = (ranks[a] < ranks[b]) | (
        (ranks[a] == ranks[b])
        & ((crowd[a] > crowd[b]) | ((crowd[a] == crowd[b]) & (coin < 0.5)))
    )
    parents = pop[np.where(a_wins, a, b)]

    crossed = rng.random(n) < config.crossover_rate
    midpoint = (parents[:, 0] + parents[:, 1] + 1) // 2
    children = np.where(crossed, midpoint, parents[:, 0])

    mutated = rng.random(n) < config.mutation_rate
    steps = MUTATION_STEPS[rng.integers(0, len(MUTATION_STEPS), size=n)]
    children = np.where(mutated, children + steps, children)
    return np.clip(children, low, high)


def evolve(
    instance: ProblemInstance,
    config: GaConfig = GaConfig(),
    on_generation: Optional[Callable[[int, np.ndarray, np.ndarray], None]] = None,
) -> ParetoSet:
    """Run NSGA-II and return the final population's first front.

    ``on_generation(gen, l1s, objectives)`` is called with the population
    after initialisation (gen 0) and after every generation's survival.
    Infeasible splits are ranked like any other; filtering happens at
    decision time.
    """
    total = instance.total_layers
    if total < 2:
        raise InvalidInstance("model needs at least 2 layers")
    low, high = 1, total - 1
    rng = np.random.Generator(np.random.PCG64(config.seed))
    objectives = _ObjectiveCache(instance)

    pop = rng.integers(low, high + 1, size=config.population_size)
    if on_generation:
        on_generation(0, pop.copy(), objectives(pop))
    ranks, crowd = _population_scores(pop, objectives)
    for gen in range(1, config.generations + 1):
        children = _offspring(pop, ranks, crowd, rng, config, low, high)
        pop = _survive(np.concatenate([pop, children]), config.population_size, objectives)
        ranks, crowd = _population_scores(pop, objectives)
        if on_generation:
            on_generation(gen, pop.copy(), objectives(pop))

    distinct = np.unique(pop)
    objs = objectives(distinct)
    front = fast_non_dominated_sort(objs)[0]
    crowd = crowding_distances(objs[front])
    members = []
    for idx, distance in zip(front, crowd):
        l1 = int(distinct[idx])
        members.append(
            Individual(
                candidate=instance.candidate(l1),
                objectives=evaluate(instance, instance.candidate(l1)),
                rank=0,
                crowding=float(distance),
                feasible=is_feasible(instance, l1),
            )
        )
    return ParetoSet(tuple(members))
