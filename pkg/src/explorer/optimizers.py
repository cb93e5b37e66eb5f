# src/explorer/optimizers.py

"""
ParetoOptimize : ramener un point sur l'ensemble de Pareto

- MGDA + line search (pas initial 1, décroissance ×0.9)
- descente de gradient sur une somme pondérée (baseline WeightedSum)
"""

import numpy as np
from loguru import logger

from src.core.exceptions import DivergenceError, StalledError, ValidationError
from src.core.problem import alpha_weights
from src.core.types import ParetoRecord, Stage, as_param_vector
from src.solvers.simplex import min_norm_alpha

ETA_DECAY = 0.9
ETA_MIN = 1e-10
# décroissance suffisante : f_i(x - ηd) <= f_i(x) - σ η ‖d‖²
ARMIJO_SIGMA = 1e-4
DIVERGENCE_FACTOR = 10.0


def _line_search(problem, x, f, d):
    """
    Plus grand pas η = 0.9^j qui fait décroître strictement tous les objectifs

    Pour le point de norme minimale, ∇f_i·d >= ‖d‖² pour tout i : la condition
    d'Armijo utilise donc ‖d‖² comme pente commune.
    """
    slope = float(d @ d)
    eta = 1.0
    while eta >= ETA_MIN:
        candidate = x - eta * d
        f_new = problem.evaluate(candidate)
        if np.all(f_new <= f - ARMIJO_SIGMA * eta * slope) and np.any(f_new < f):
            return candidate, f_new, eta
        eta *= ETA_DECAY
    return None, None, eta


def pareto_optimize_mgda(problem, x0, tol=1e-6, max_iters=5000, record_id=0, parent_id=None,
                        f0=None) -> ParetoRecord:
    """
    MGDA : x ← x - η d avec d = Σ α_i ∇f_i (point de norme minimale)

    Args:
        problem: ProblemHandle
        x0: Point de départ
        tol: Seuil sur le résidu de stationnarité
        max_iters: Nombre max d'itérations externes
        record_id: Identifiant du ParetoRecord produit
        parent_id: Parent (None pour une graine)
        f0: f(x0) si déjà évalué par l'appelant

    Returns:
        ParetoRecord (stage = optimized)
    """
    if tol <= 0:
        raise ValidationError("tol doit être > 0")

    x = as_param_vector(x0, problem.n)
    f = problem.evaluate(x) if f0 is None else np.asarray(f0, dtype=np.float64)
    grads = problem.gradients(x)
    alpha = min_norm_alpha(grads)

    def _record(x_, f_, grads_, alpha_):
        return ParetoRecord(id=record_id, x=x_, f=f_, grads=grads_, alpha=alpha_,
                            parent_id=parent_id, stage=Stage.OPTIMIZED)

    best = _record(x, f, grads, alpha)
    iteration = 0

    while alpha.min_norm_value > tol:
        if iteration >= max_iters:
            logger.warning(f"⚠️ MGDA : {max_iters} itérations atteintes (résidu {alpha.min_norm_value:.2e})")
            break
        iteration += 1

        candidate, f_new, eta = _line_search(problem, x, f, alpha.combined)
        if candidate is None:
            logger.error(f"❌ MGDA bloqué après {iteration} itérations : line search épuisée "
                         f"(résidu {best.residual:.2e})")
            raise StalledError("Line search sans progrès", best=best)

        x, f = candidate, f_new
        grads = problem.gradients(x)
        alpha = min_norm_alpha(grads)
        logger.debug(f"MGDA it={iteration} η={eta:.3e} résidu={alpha.min_norm_value:.3e}")
        if alpha.min_norm_value < best.residual:
            best = _record(x, f, grads, alpha)

    logger.debug(f"MGDA terminé en {iteration} itérations, résidu {alpha.min_norm_value:.2e}")
    return _record(x, f, grads, alpha)


def weighted_sum_gd(problem, x0, weights, lr0=0.005, iters=50, start_id=0, parent_id=None) -> list:
    """
    Descente de gradient sur Σ w_i f_i avec lr = lr0 / √(t+1)

    Args:
        problem: ProblemHandle
        x0: Point de départ
        weights: Poids sur le simplexe
        lr0: Pas initial
        iters: Nombre d'itérations
        start_id: Identifiant du premier record de la trajectoire
        parent_id: Parent du premier record

    Returns:
        list de ParetoRecord (trajectoire complète, point de départ inclus)
    """
    w = alpha_weights(weights, problem.m)
    if lr0 <= 0:
        raise ValidationError("lr0 doit être > 0")

    x = as_param_vector(x0, problem.n)
    f = problem.evaluate(x)
    grads = problem.gradients(x)
    start = float(w @ f)
    limit = DIVERGENCE_FACTOR * max(abs(start), np.finfo(np.float64).tiny)

    trajectory = [ParetoRecord(id=start_id, x=x, f=f, grads=grads, alpha=min_norm_alpha(grads),
                               parent_id=parent_id, stage=Stage.OPTIMIZED)]
    for t in range(iters):
        lr = lr0 / np.sqrt(t + 1)
        x = x - lr * (w @ grads)
        f = problem.evaluate(x)
        grads = problem.gradients(x)
        trajectory.append(ParetoRecord(id=start_id + t + 1, x=x, f=f, grads=grads, alpha=min_norm_alpha(grads),
                                       parent_id=trajectory[-1].id, stage=Stage.OPTIMIZED))
        if float(w @ f) > limit:
            logger.error(f"❌ Descente divergente à l'itération {t + 1} ({float(w @ f):.3e} > {limit:.3e})")
            raise DivergenceError("La somme pondérée a été multipliée par plus de 10", trajectory=trajectory)

    logger.debug(f"WeightedSum : {iters} itérations, objectif {start:.4f} → {float(w @ f):.4f}")
    return trajectory
