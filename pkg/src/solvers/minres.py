# src/solvers/minres.py

"""
MINRES sans matrice pour opérateurs symétriques (indéfinis, éventuellement singuliers)

Récurrence de Lanczos + rotations de Givens (Paige & Saunders). L'historique
des résidus vient de la récurrence : il est monotone décroissant.
Nombre d'appels à l'opérateur = itérations + 1 (résidu initial b - A x0).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from loguru import logger

from src.core.exceptions import BreakdownError, ContractError, ValidationError

EPS = np.finfo(np.float64).eps


@dataclass
class MinresReport:
    solution: np.ndarray
    residual_history: list = field(default_factory=list)
    iterations_used: int = 0
    converged: bool = False
    operator_calls: int = 0

    @property
    def residual(self) -> float:
        """Dernier résidu ‖b - A v‖ estimé"""
        return self.residual_history[-1] if self.residual_history else 0.0


class _CountedOperator:
    def __init__(self, apply, n):
        self.apply = apply
        self.n = n
        self.calls = 0

    def __call__(self, v):
        self.calls += 1
        out = np.asarray(self.apply(v), dtype=np.float64).reshape(-1)
        if out.size != self.n:
            raise ContractError(f"L'opérateur renvoie un vecteur de taille {out.size}, attendu {self.n}")
        return out


def minres(apply: Callable, b, k: int, tol: float = 1e-8, x0=None,
           preconditioner: Optional[Callable] = None) -> MinresReport:
    """
    Résout A v = b au sens des moindres résidus dans l'espace de Krylov

    Args:
        apply: Opérateur symétrique v ↦ A v
        b: Second membre
        k: Nombre max d'itérations (>= 1)
        tol: Tolérance sur ‖r‖ / ‖r0‖
        x0: Point initial (zéro par défaut)
        preconditioner: Préconditionneur SPD v ↦ M⁻¹ v (identité par défaut)

    Returns:
        MinresReport
    """
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    n = b.size
    if k < 1:
        raise ValidationError("k doit être >= 1")
    if tol <= 0:
        raise ValidationError("tol doit être > 0")

    A = _CountedOperator(apply, n)
    M = preconditioner if preconditioner is not None else (lambda r: r)

    x = np.zeros(n) if x0 is None else np.asarray(x0, dtype=np.float64).reshape(-1).copy()
    r1 = b - A(x)
    y = np.asarray(M(r1), dtype=np.float64)
    beta1_sq = float(r1 @ y)
    if beta1_sq < 0:
        raise ValidationError("Le préconditionneur n'est pas défini positif")
    beta1 = np.sqrt(beta1_sq)

    history = [beta1]
    if beta1 == 0.0:
        return MinresReport(solution=x, residual_history=history, iterations_used=0,
                            converged=True, operator_calls=A.calls)

    oldb = 0.0
    beta = beta1
    dbar = 0.0
    epsln = 0.0
    phibar = beta1
    tnorm2 = 0.0
    cs = -1.0
    sn = 0.0
    w = np.zeros(n)
    w2 = np.zeros(n)
    r2 = r1
    converged = False
    iterations = 0

    for itn in range(1, k + 1):
        x_prev = x
        s = 1.0 / beta
        v = s * y
        y = A(v)
        if itn >= 2:
            y = y - (beta / oldb) * r1
        alfa = float(v @ y)
        y = y - (alfa / beta) * r2
        r1 = r2
        r2 = y
        y = np.asarray(M(r2), dtype=np.float64)
        oldb = beta
        beta_sq = float(r2 @ y)
        if beta_sq < 0:
            raise ValidationError("Le préconditionneur n'est pas défini positif")
        beta = np.sqrt(beta_sq)
        tnorm2 += alfa ** 2 + oldb ** 2 + beta ** 2

        # rotation précédente
        oldeps = epsln
        delta = cs * dbar + sn * alfa
        gbar = sn * dbar - cs * alfa
        epsln = sn * beta
        dbar = -cs * beta

        # nouvelle rotation
        gamma = max(np.hypot(gbar, beta), EPS)
        cs = gbar / gamma
        sn = beta / gamma
        phi = cs * phibar
        phibar = sn * phibar

        w1 = w2
        w2 = w
        w = (v - oldeps * w1 - delta * w2) / gamma
        x = x + phi * w

        if not (np.isfinite(alfa) and np.isfinite(beta) and np.all(np.isfinite(x))):
            logger.error(f"❌ MINRES : NaN dans la récurrence à l'itération {itn}")
            raise BreakdownError("NaN dans la récurrence MINRES", last_iterate=x_prev)

        iterations = itn
        history.append(min(abs(phibar), history[-1]))
        logger.debug(f"MINRES it={itn} résidu={history[-1]:.3e}")

        if history[-1] <= tol * beta1:
            converged = True
            break
        # breakdown "chanceux" : l'espace de Krylov est invariant
        if beta <= EPS * np.sqrt(tnorm2):
            converged = True
            break

    return MinresReport(solution=x, residual_history=history, iterations_used=iterations,
                        converged=converged, operator_calls=A.calls)
