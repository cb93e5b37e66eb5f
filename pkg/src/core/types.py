# src/core/types.py

"""
Types de base partagés par tous les modules

- ParamVector / ObjectiveValues : vecteurs numpy float64 validés
- Stage : étape qui a produit un ParetoRecord
- CostCounters : compteurs d'évaluations (f, ∇f, HVP)
- ParetoRecord : une solution explorée (sortie de l'algorithme d'exploration)
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional

import numpy as np

from src.config import settings
from .exceptions import DimensionError


def as_param_vector(values, n=None) -> np.ndarray:
    """
    Convertit en ParamVector (vecteur dense float64 de longueur n)

    Args:
        values: Séquence ou array
        n: Longueur attendue (None = pas de contrôle)

    Returns:
        np.ndarray 1-D
    """
    x = np.asarray(values, dtype=np.float64).reshape(-1)
    if n is not None and x.size != n:
        raise DimensionError(f"ParamVector de longueur {x.size}, attendu {n}")
    if not np.all(np.isfinite(x)):
        raise DimensionError("ParamVector contient des valeurs non finies")
    return x


def as_objective_values(values, m=None) -> np.ndarray:
    """Convertit en ObjectiveValues (longueur m >= 2, valeurs finies)"""
    f = np.asarray(values, dtype=np.float64).reshape(-1)
    if m is not None and f.size != m:
        raise DimensionError(f"ObjectiveValues de longueur {f.size}, attendu {m}")
    if f.size < 2:
        raise DimensionError("Il faut au moins 2 objectifs")
    if not np.all(np.isfinite(f)):
        raise DimensionError("ObjectiveValues contient des valeurs non finies")
    return f


def _frozen(array):
    if array is None:
        return None
    array = np.array(array, dtype=np.float64, copy=True)
    array.flags.writeable = False
    return array


class Stage(str, Enum):
    SEED = 'seed'
    OPTIMIZED = 'optimized'
    EXPANDED = 'expanded'


@dataclass
class CostCounters:
    """
    Compteurs d'évaluations de l'oracle

    n_f : évaluations des objectifs
    n_grad : évaluations de l'ensemble des m gradients en un point
    n_hvp : produits Hessienne-vecteur (m par application de H combinée)
    """

    n_f: int = 0
    n_grad: int = 0
    n_hvp: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def add(self, n_f=0, n_grad=0, n_hvp=0):
        """Incrément atomique"""
        with self._lock:
            self.n_f += n_f
            self.n_grad += n_grad
            self.n_hvp += n_hvp

    def merge(self, other: CostCounters) -> CostCounters:
        """Somme composante par composante (nouvel objet)"""
        return CostCounters(self.n_f + other.n_f, self.n_grad + other.n_grad, self.n_hvp + other.n_hvp)

    __add__ = merge

    def absorb(self, other: CostCounters):
        """Ajoute other dans self (fusion des compteurs d'un worker)"""
        self.add(other.n_f, other.n_grad, other.n_hvp)

    def snapshot(self) -> CostCounters:
        with self._lock:
            return CostCounters(self.n_f, self.n_grad, self.n_hvp)

    def __deepcopy__(self, memo):
        # le verrou n'est pas copiable
        return self.snapshot()

    def as_dict(self):
        return {'n_f': self.n_f, 'n_grad': self.n_grad, 'n_hvp': self.n_hvp}

    @classmethod
    def from_dict(cls, data):
        return cls(int(data.get('n_f', 0)), int(data.get('n_grad', 0)), int(data.get('n_hvp', 0)))


@dataclass(frozen=True)
class ParetoRecord:
    """
    Une solution explorée : (x, f(x), ∇f(x), α, parent, étape)

    Les gradients ne sont stockés que si m×n <= GRAD_STORAGE_CAP ;
    sinon ils sont recalculés à la demande via gradients(problem).
    """

    id: int
    x: np.ndarray
    f: np.ndarray
    grads: Optional[np.ndarray] = None
    alpha: Optional[Any] = None
    parent_id: Optional[int] = None
    stage: Stage = Stage.OPTIMIZED

    def __post_init__(self):
        object.__setattr__(self, 'x', _frozen(self.x))
        object.__setattr__(self, 'f', _frozen(self.f))
        grads = self.grads
        if grads is not None and np.size(grads) > settings.GRAD_STORAGE_CAP:
            grads = None
        object.__setattr__(self, 'grads', _frozen(grads))
        object.__setattr__(self, 'stage', Stage(self.stage))

    @property
    def residual(self) -> float:
        """Résidu de stationnarité de Pareto (nan si α absent)"""
        if self.alpha is None:
            return float('nan')
        return float(self.alpha.min_norm_value)

    def gradients(self, problem) -> np.ndarray:
        """Gradients stockés, ou recalculés si non stockés"""
        if self.grads is not None:
            return self.grads
        return problem.gradients(self.x)
