# src/solvers/simplex.py

"""
Problème du point de norme minimale sur le simplexe

    min_α ‖Σ α_i g_i‖₂  s.c.  α >= 0, Σ α_i = 1

- m = 2 : forme fermée (projection écrêtée)
- m >= 3 : Frank-Wolfe avec pas "away", puis résolution exacte sur le support
- correction des gradients : c = ∇f(x)ᵀα (aucune seconde résolution)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from loguru import logger

from src.core.exceptions import DimensionError, SolverError

FW_TOL = 1e-10
FW_MAX_ITER = 10_000
# poids relatifs en dessous de ce seuil retirés du support avant la résolution exacte
ALPHA_PRUNE = 1e-9


@dataclass(frozen=True)
class AlphaResult:
    """α optimal, valeur ‖Σα_i∇f_i‖ et combinaison Σα_i∇f_i"""

    alpha: np.ndarray
    min_norm_value: float
    combined: np.ndarray


@dataclass(frozen=True)
class CorrectionResult:
    """α et vecteur de correction c tel que Σα_i(∇f_i - c) = 0"""

    alpha: np.ndarray
    c: np.ndarray


def _check_grads(grads) -> np.ndarray:
    grads = np.asarray(grads, dtype=np.float64)
    if grads.ndim != 2 or grads.shape[0] < 2:
        raise DimensionError(f"Matrice de gradients m×n attendue avec m >= 2, reçu {grads.shape}")
    if not np.all(np.isfinite(grads)):
        raise DimensionError("Gradients non finis")
    return grads


def _result(grads, alpha) -> AlphaResult:
    alpha = np.clip(alpha, 0.0, None)
    alpha = alpha / alpha.sum()
    combined = alpha @ grads
    return AlphaResult(alpha=alpha, min_norm_value=float(np.linalg.norm(combined)), combined=combined)


def _two_gradients(grads) -> np.ndarray:
    g1, g2 = grads
    diff = g1 - g2
    denom = float(diff @ diff)
    if denom == 0.0:
        # gradients identiques (ou tous nuls) : α uniforme
        return np.array([0.5, 0.5])
    a1 = float(np.clip((g2 - g1) @ g2 / denom, 0.0, 1.0))
    return np.array([a1, 1.0 - a1])


def _polish(gram, alpha, scale):
    """Résout le QP restreint au support courant (système KKT) et vérifie l'optimalité"""
    support = np.flatnonzero(alpha > 0)
    k = support.size
    kkt = np.zeros((k + 1, k + 1))
    kkt[:k, :k] = 2.0 * gram[np.ix_(support, support)]
    kkt[:k, k] = 1.0
    kkt[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    solution = np.linalg.lstsq(kkt, rhs, rcond=None)[0][:k]
    if np.any(solution < -1e-12) or abs(solution.sum() - 1.0) > 1e-9:
        return None
    candidate = np.zeros_like(alpha)
    candidate[support] = np.clip(solution, 0.0, None)
    candidate /= candidate.sum()
    g_alpha = gram @ candidate
    value = float(candidate @ g_alpha)
    # optimalité globale : aucun sommet ne fait mieux que la valeur courante
    if np.all(g_alpha >= value - 1e-12 * scale) and value <= float(alpha @ gram @ alpha) + 1e-14 * scale:
        return candidate
    return None


def _best_candidate(gram, alpha, scale) -> np.ndarray:
    """Meilleur α parmi l'itéré, l'itéré élagué puis résolu exactement, et le meilleur sommet"""
    candidates = [alpha]
    pruned = np.where(alpha >= ALPHA_PRUNE * alpha.max(), alpha, 0.0)
    polished = _polish(gram, pruned / pruned.sum(), scale)
    if polished is not None:
        candidates.append(polished)
    vertex = np.zeros_like(alpha)
    vertex[int(np.argmin(np.diag(gram)))] = 1.0
    candidates.append(vertex)
    values = [float(c @ gram @ c) for c in candidates]
    return candidates[int(np.argmin(values))]


def _frank_wolfe(grads, tol=FW_TOL, max_iter=FW_MAX_ITER) -> np.ndarray:
    m = grads.shape[0]
    gram = grads @ grads.T
    scale = max(float(np.max(np.diag(gram))), np.finfo(float).tiny)
    alpha = np.full(m, 1.0 / m)

    for iteration in range(max_iter):
        g_alpha = gram @ alpha
        grad = 2.0 * g_alpha
        s = int(np.argmin(grad))
        support = np.flatnonzero(alpha > 0)
        a = int(support[np.argmax(grad[support])])
        gap_fw = float(grad @ alpha - grad[s])
        if gap_fw <= tol * scale:
            logger.debug(f"Frank-Wolfe convergé en {iteration} itérations (gap={gap_fw:.2e})")
            break
        gap_away = float(grad[a] - grad @ alpha)
        if gap_fw >= gap_away:
            direction = -alpha.copy()
            direction[s] += 1.0
            gamma_max = 1.0
        else:
            direction = alpha.copy()
            direction[a] -= 1.0
            gamma_max = alpha[a] / (1.0 - alpha[a])
        curvature = float(direction @ gram @ direction)
        if curvature <= 0.0:
            gamma = gamma_max
        else:
            gamma = float(np.clip(-(direction @ g_alpha) / curvature, 0.0, gamma_max))
        alpha = alpha + gamma * direction
        alpha[alpha < 1e-15] = 0.0
        alpha /= alpha.sum()
    else:
        polished = _polish(gram, alpha, scale)
        if polished is None:
            logger.error(f"❌ Frank-Wolfe sans convergence après {max_iter} itérations")
            raise SolverError("Frank-Wolfe n'a pas convergé", best_iterate=_result(grads, alpha))
        return _best_candidate(gram, polished, scale)

    polished = _polish(gram, alpha, scale)
    return _best_candidate(gram, polished if polished is not None else alpha, scale)


def min_norm_alpha(grads) -> AlphaResult:
    """
    Point de norme minimale dans l'enveloppe convexe des gradients

    Args:
        grads: Matrice m×n (ligne i = ∇f_i)

    Returns:
        AlphaResult
    """
    grads = _check_grads(grads)
    if grads.shape[0] == 2:
        alpha = _two_gradients(grads)
    else:
        alpha = _frank_wolfe(grads)
    return _result(grads, alpha)


def corrected_alpha(grads) -> CorrectionResult:
    """
    Correction minimale des gradients (α inchangé, c = ∇fᵀα)

    Returns:
        CorrectionResult
    """
    result = min_norm_alpha(grads)
    return CorrectionResult(alpha=result.alpha, c=result.combined.copy())


def stationarity_residual(grads) -> float:
    """0 ssi le point est stationnaire au sens de Pareto"""
    return min_norm_alpha(grads).min_norm_value


def project_simplex(values) -> np.ndarray:
    """Projection euclidienne sur le simplexe {α >= 0, Σα = 1} (tri des composantes)"""
    values = np.asarray(values, dtype=np.float64).reshape(-1)
    ordered = np.sort(values)[::-1]
    cumulative = np.cumsum(ordered) - 1.0
    ranks = np.arange(1, values.size + 1)
    rho = np.flatnonzero(ordered - cumulative / ranks > 0)[-1]
    theta = cumulative[rho] / (rho + 1)
    return np.maximum(values - theta, 0.0)
