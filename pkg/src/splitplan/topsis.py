"""Pick one split from a Pareto set by distance to the ideal point.

Every objective is a cost. The decision matrix is column-normalised over
the whole Pareto set, infeasible rows are then dropped, the ideal point is
the per-column minimum of what remains, and the row closest to it in
Euclidean distance wins. There is no anti-ideal term and no weighting.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .errors import InvalidMatrix, NoFeasibleSolution, ValidationError
from .nsga2 import Individual, ParetoSet
from .problem import ProblemInstance, is_feasible

NORMALIZATIONS = ("vector", "minmax")


def normalize(matrix, method: str = "vector") -> np.ndarray:
    """Column-normalise a non-negative decision matrix.

    ``vector`` divides each column by its Euclidean norm; ``minmax`` maps it
    onto [0, 1]. All-zero (vector) or constant (minmax) columns become zeros.
    """
    m = np.array(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] == 0:
        raise InvalidMatrix(f"decision matrix must be 2-D with at least one row, got shape {m.shape}")
    if not np.all(np.isfinite(m)) or np.any(m < 0):
        raise InvalidMatrix("decision matrix entries must be finite and non-negative")
    if method == "vector":
        scale = np.sqrt(np.sum(m * m, axis=0))
        shift = np.zeros_like(scale)
    elif method == "minmax":
        shift = m.min(axis=0)
        scale = m.max(axis=0) - shift
    else:
        raise ValidationError(f"unknown normalization {method!r}; choose from {NORMALIZATIONS}")
    out = np.zeros_like(m)
    live = scale > 0
    out[:, live] = (m[:, live] - shift[live]) / scale[live]
    return out


def ideal_distances(matrix, feasible=None, method: str = "vector") -> np.ndarray:
    """Distance of each feasible row to the ideal point; NaN for infeasible rows."""
    normalized = normalize(matrix, method)
    mask = np.ones(len(normalized), dtype=bool) if feasible is None else np.asarray(feasible, dtype=bool)
    if mask.shape != (len(normalized),):
        raise ValidationError("feasibility mask must have one entry per row")
    if not mask.any():
        raise NoFeasibleSolution("no feasible row in the decision matrix")
    kept = normalized[mask]
    ideal = kept.min(axis=0)
    distances = np.full(len(normalized), np.nan)
    distances[mask] = np.sqrt(np.sum((kept - ideal) ** 2, axis=1))
    return distances


def closest_row(matrix, feasible=None, method: str = "vector", tie_keys=None) -> int:
    """Index of the feasible row nearest the ideal point.

    Equal distances go to the smallest ``tie_keys`` entry (row index when
    omitted).
    """
    distances = ideal_distances(matrix, feasible, method)
    keys = np.arange(len(distances)) if tie_keys is None else np.asarray(tie_keys)
    candidates = np.flatnonzero(~np.isnan(distances))
    return int(min(candidates, key=lambda i: (distances[i], keys[i])))


def select_best(
    pareto: ParetoSet,
    instance: Optional[ProblemInstance] = None,
    normalization: str = "vector",
) -> Individual:
    """Choose the best member; ties go to the smaller split index.

    Feasibility is re-checked against ``instance`` when given, otherwise each
    member's own ``feasible`` flag is trusted.
    """
    if not len(pareto):
        raise NoFeasibleSolution("empty Pareto set")
    if instance is None:
        mask = pareto.feasible_mask()
    else:
        mask = np.array([is_feasible(instance, m.l1) for m in pareto], dtype=bool)
    row = closest_row(pareto.objective_matrix(), mask, normalization, tie_keys=pareto.l1s)
    return pareto.members[row]
