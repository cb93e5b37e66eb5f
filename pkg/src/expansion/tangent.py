# src/expansion/tangent.py

"""
ParetoExpand : directions tangentes à l'ensemble de Pareto

Au point stationnaire x* (poids α), une direction tangente v résout

    H(x*) v = ∇f(x*)ᵀ β,   H = Σ α_i ∇²f_i(x*)

pour un β tiré au hasard. Le système est résolu par MINRES (k itérations
au plus), sans jamais former H : seulement des produits Hessienne-vecteur.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from loguru import logger

from src.core.exceptions import DegenerateSampleError, DimensionError, DomainError
from src.core.problem import alpha_weights
from src.core.types import as_param_vector
from src.solvers.minres import MinresReport, minres

DEGENERATE_RHS_TOL = 1e-14
NEUTRAL_TOL = 1e-12
MAX_RESAMPLES = 8


class BetaStrategy(str, Enum):
    STANDARD_NORMAL = 'standard_normal'
    CONVEX_SPAN = 'convex_span'
    ONE_HOT = 'one_hot'
    COIN_FLIP_SUBSET = 'coin_flip_subset'


@dataclass(frozen=True)
class BetaSample:
    beta: np.ndarray
    strategy: BetaStrategy
    index: Optional[int] = None

    def __post_init__(self):
        beta = np.asarray(self.beta, dtype=np.float64).reshape(-1)
        if not np.any(beta != 0.0):
            raise DomainError("β doit être non nul")
        object.__setattr__(self, 'beta', beta)
        object.__setattr__(self, 'strategy', BetaStrategy(self.strategy))


@dataclass(frozen=True)
class TangentDirection:
    """Direction unitaire v, résidu MINRES final, β utilisé"""

    v: np.ndarray
    residual: float
    beta_used: Optional[BetaSample] = None
    corrected: bool = False
    neutral: bool = False
    report: Optional[MinresReport] = None

    def __post_init__(self):
        v = as_param_vector(self.v)
        if abs(np.linalg.norm(v) - 1.0) > 1e-12:
            raise DimensionError(f"Direction non unitaire (‖v‖ = {np.linalg.norm(v):.3e})")
        object.__setattr__(self, 'v', v)

    def flipped(self) -> TangentDirection:
        return TangentDirection(-self.v, self.residual, self.beta_used, self.corrected, self.neutral, self.report)


def sample_beta(strategy, m, rng: np.random.Generator, index=None) -> BetaSample:
    """
    Tire β selon la stratégie

    Args:
        strategy: BetaStrategy (ou sa valeur texte)
        m: Nombre d'objectifs
        rng: Générateur numpy
        index: Composante active pour one_hot

    Returns:
        BetaSample
    """
    strategy = BetaStrategy(strategy)
    if strategy is BetaStrategy.STANDARD_NORMAL:
        beta = rng.standard_normal(m)
        while not np.any(beta != 0.0):
            beta = rng.standard_normal(m)
    elif strategy is BetaStrategy.CONVEX_SPAN:
        beta = rng.dirichlet(np.ones(m))
    elif strategy is BetaStrategy.ONE_HOT:
        if index is None or not 0 <= index < m:
            raise DomainError(f"one_hot demande un index dans [0, {m}), reçu {index}")
        beta = np.zeros(m)
        beta[index] = 1.0
    else:
        # on exclut les tirages tout-0 et tout-1
        beta = rng.integers(0, 2, size=m)
        while beta.min() == beta.max():
            beta = rng.integers(0, 2, size=m)
        beta = beta.astype(np.float64)
    return BetaSample(beta=beta, strategy=strategy, index=index)


def tangent_rhs(grads, alpha, beta, use_correction) -> np.ndarray:
    """Second membre ∇fᵀβ, ou (∇fᵀ - c 1ᵀ)β avec c = ∇fᵀα si correction"""
    grads = np.asarray(grads, dtype=np.float64)
    beta = np.asarray(getattr(beta, 'beta', beta), dtype=np.float64)
    if beta.size != grads.shape[0]:
        raise DimensionError(f"β de longueur {beta.size}, attendu {grads.shape[0]}")
    rhs = grads.T @ beta
    if use_correction:
        c = alpha_weights(alpha, grads.shape[0]) @ grads
        rhs = rhs - c * beta.sum()
    return rhs


def expand_direction(problem, x, alpha, beta: BetaSample, k: int, use_correction: bool = False,
                     grads=None, tol: float = 1e-8) -> TangentDirection:
    """
    Une direction tangente au point stationnaire x

    Args:
        problem: ProblemHandle
        x: Point stationnaire (ou presque)
        alpha: AlphaResult ou poids du simplexe
        beta: BetaSample
        k: Nombre max d'itérations MINRES
        use_correction: Corrige les gradients (c = ∇fᵀα) avant de former le second membre
        grads: Gradients en x (recalculés si None)
        tol: Tolérance relative de MINRES

    Returns:
        TangentDirection (coût : m HVP par appel à l'opérateur)
    """
    x = as_param_vector(x, problem.n)
    weights = alpha_weights(alpha, problem.m)
    if grads is None:
        grads = problem.gradients(x)
    grads = np.asarray(grads, dtype=np.float64)

    rhs = tangent_rhs(grads, weights, beta, use_correction)
    scale = np.linalg.norm(grads)
    if np.linalg.norm(rhs) <= DEGENERATE_RHS_TOL * scale or not np.any(rhs != 0.0):
        logger.error(f"❌ Second membre nul pour β = {beta.beta}")
        raise DegenerateSampleError("Second membre numériquement nul, β à retirer")

    report = minres(problem.hessian_operator(x, weights), rhs, k, tol=tol)
    norm = np.linalg.norm(report.solution)
    if norm == 0.0:
        logger.error("❌ MINRES renvoie une direction nulle")
        raise DegenerateSampleError("Direction tangente nulle, β à retirer")

    logger.debug(f"Direction tangente : {report.iterations_used} it., résidu {report.residual:.3e}")
    return TangentDirection(v=report.solution / norm, residual=report.residual, beta_used=beta,
                            corrected=bool(use_correction), report=report)


def expand_with_resampling(problem, x, alpha, strategy, rng, k, use_correction=False, grads=None,
                           index=None, tol=1e-8, max_tries=MAX_RESAMPLES) -> TangentDirection:
    """expand_direction en retirant β (au plus max_tries tirages) si le second membre est dégénéré"""
    last_error = None
    for attempt in range(max_tries):
        beta = sample_beta(strategy, problem.m, rng, index=index)
        try:
            return expand_direction(problem, x, alpha, beta, k, use_correction, grads=grads, tol=tol)
        except DegenerateSampleError as error:
            logger.warning(f"⚠️ β dégénéré (tirage {attempt + 1}/{max_tries})")
            last_error = error
    raise last_error


def orient_direction(direction: TangentDirection, grads, target_task: int) -> TangentDirection:
    """
    Lève l'ambiguïté de signe : la variation prédite de f_target doit être négative

    Returns:
        TangentDirection (neutral = True si |∇f_targetᵀv| <= 1e-12)
    """
    grads = np.asarray(grads, dtype=np.float64)
    if not 0 <= target_task < grads.shape[0]:
        raise DimensionError(f"Tâche cible {target_task} hors de [0, {grads.shape[0]})")
    slope = float(grads[target_task] @ direction.v)
    if abs(slope) <= NEUTRAL_TOL:
        return TangentDirection(direction.v, direction.residual, direction.beta_used,
                                direction.corrected, True, direction.report)
    if slope > 0:
        return direction.flipped()
    return direction


def predict_delta_f(grads, v, s) -> np.ndarray:
    """Variation des objectifs prédite au premier ordre : s ∇f(x) v"""
    if s < 0:
        raise DomainError(f"Pas s négatif : {s}")
    v = getattr(v, 'v', v)
    return s * (np.asarray(grads, dtype=np.float64) @ np.asarray(v, dtype=np.float64))
