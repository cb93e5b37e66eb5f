# src/core/problem.py

"""
Interface de l'oracle multi-objectif (ProblemHandle)

Chaque problème fournit f, les m gradients et le produit Hessienne-vecteur de
la Hessienne combinée H(x) = Σ α_i ∇²f_i(x). Tous les appels sont comptés.
"""

from __future__ import annotations

import copy
from abc import ABC, abstractmethod
from contextlib import contextmanager

import numpy as np

from .exceptions import DimensionError, NumericOverflowError, ValidationError
from .types import CostCounters, as_param_vector


def alpha_weights(alpha, m=None) -> np.ndarray:
    """
    Extrait les poids α (accepte un AlphaResult ou un array)

    Vérifie α >= 0 et Σα = 1.
    """
    weights = np.asarray(getattr(alpha, 'alpha', alpha), dtype=np.float64).reshape(-1)
    if m is not None and weights.size != m:
        raise DimensionError(f"α de longueur {weights.size}, attendu {m}")
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-9:
        raise ValidationError(f"α n'est pas sur le simplexe : {weights}")
    return weights


class ProblemHandle(ABC):
    """
    Oracle déterministe (problèmes full-batch)

    Les sous-classes implémentent _evaluate, _gradients et _hvp ;
    cette classe gère la validation des dimensions et le comptage.
    """

    name = 'problem'

    def __init__(self, n, m):
        self.n = int(n)
        self.m = int(m)
        self.counters = CostCounters()

    # ----- à implémenter -----

    @abstractmethod
    def _evaluate(self, x) -> np.ndarray:
        ...

    @abstractmethod
    def _gradients(self, x) -> np.ndarray:
        ...

    @abstractmethod
    def _hvp(self, x, alpha, v) -> np.ndarray:
        ...

    # ----- API publique comptée -----

    def evaluate(self, x) -> np.ndarray:
        """f(x), incrémente n_f"""
        x = as_param_vector(x, self.n)
        f = np.asarray(self._evaluate(x), dtype=np.float64)
        self.counters.add(n_f=1)
        self._check_finite(f, 'f(x)')
        return f

    def gradients(self, x) -> np.ndarray:
        """Matrice m×n des gradients, incrémente n_grad d'une unité"""
        x = as_param_vector(x, self.n)
        grads = np.asarray(self._gradients(x), dtype=np.float64).reshape(self.m, self.n)
        self.counters.add(n_grad=1)
        self._check_finite(grads, '∇f(x)')
        return grads

    def hvp(self, x, alpha, v) -> np.ndarray:
        """H(x)v avec H = Σ α_i ∇²f_i, incrémente n_hvp de m"""
        x = as_param_vector(x, self.n)
        v = as_param_vector(v, self.n)
        weights = alpha_weights(alpha, self.m)
        hv = np.asarray(self._hvp(x, weights, v), dtype=np.float64).reshape(-1)
        self.counters.add(n_hvp=self.m)
        self._check_finite(hv, 'H(x)v')
        return hv

    def hessian_operator(self, x, alpha):
        """Opérateur linéaire v ↦ H(x)v (pour MINRES)"""
        x = as_param_vector(x, self.n)
        weights = alpha_weights(alpha, self.m)
        return lambda v: self.hvp(x, weights, v)

    # ----- comptage par étape -----

    @contextmanager
    def metered(self, counters: CostCounters):
        """Redirige temporairement le comptage vers counters"""
        previous = self.counters
        self.counters = counters
        try:
            yield counters
        finally:
            self.counters = previous

    def spawn(self) -> ProblemHandle:
        """Copie indépendante (un worker = un oracle), compteurs remis à zéro"""
        clone = copy.deepcopy(self)
        clone.counters = CostCounters()
        return clone

    def describe(self) -> dict:
        return {'name': self.name, 'n': self.n, 'm': self.m}

    @staticmethod
    def _check_finite(values, label):
        if not np.all(np.isfinite(values)):
            raise NumericOverflowError(f"{label} contient des valeurs non finies")
