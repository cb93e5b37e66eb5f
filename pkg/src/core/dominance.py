# src/core/dominance.py

"""
Relations de dominance de Pareto (minimisation, comparaison flottante exacte)
"""

import numpy as np

from .exceptions import DimensionError


def dominates(a, b) -> bool:
    """
    a domine b ssi a <= b partout et a != b

    Args:
        a: ObjectiveValues
        b: ObjectiveValues de même longueur

    Returns:
        bool
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionError(f"Dominance entre longueurs {a.shape} et {b.shape}")
    return bool(np.all(a <= b) and np.any(a < b))


def dominance_matrix(points) -> np.ndarray:
    """
    Dominance par paires vectorisée

    Returns:
        Matrice booléenne (n, n) : [i, j] = True ssi i domine j
    """
    points = np.asarray(points, dtype=np.float64)
    a = points[:, np.newaxis, :]
    b = points[np.newaxis, :, :]
    return np.all(a <= b, axis=2) & np.any(a < b, axis=2)


def nondominated_filter(points) -> list:
    """
    Indices des points non dominés (ordre stable, doublons conservés)

    Args:
        points: Liste d'ObjectiveValues de même longueur m

    Returns:
        list d'indices
    """
    if len(points) == 0:
        return []
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2:
        raise DimensionError("Les points doivent avoir une longueur m uniforme")
    dominated = dominance_matrix(points).any(axis=0)
    return [int(i) for i in np.flatnonzero(~dominated)]


def compare_fronts(candidate, baseline) -> dict:
    """
    Compare deux ensembles de points

    Returns:
        dict avec :
        - candidate_dominated : nb de points candidats dominés par la baseline
        - baseline_dominated : nb de points baseline dominés par un candidat
    """
    candidate = np.asarray(candidate, dtype=np.float64)
    baseline = np.asarray(baseline, dtype=np.float64)
    if candidate.size == 0 or baseline.size == 0:
        return {'candidate_dominated': 0, 'baseline_dominated': 0}

    def _cross(p, q):
        a = p[:, np.newaxis, :]
        b = q[np.newaxis, :, :]
        return np.all(a <= b, axis=2) & np.any(a < b, axis=2)

    return {
        'candidate_dominated': int(_cross(baseline, candidate).any(axis=0).sum()),
        'baseline_dominated': int(_cross(candidate, baseline).any(axis=0).sum()),
    }
