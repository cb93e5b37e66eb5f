# src/benchmarks/quadratics.py

"""
Problèmes quadratiques à structure de Pareto connue

- TwoQuadratics : f1 = ‖x - a‖², f2 = ‖x - b‖² ; ensemble de Pareto = segment [a, b]
- RankDeficientQuadratic : f1 = (x1 - 1)², f2 = (x1 + 1)² ; H a pour noyau {e2, e3}
"""

import numpy as np

from src.core.exceptions import ConfigurationError
from src.core.problem import ProblemHandle
from src.core.types import as_param_vector


class TwoQuadratics(ProblemHandle):
    """Deux paraboloïdes centrés en a et b (H = 2I pour tout α)"""

    name = 'two-quadratics'

    def __init__(self, a=(0.0, 0.0), b=(1.0, 0.0)):
        a = as_param_vector(a)
        b = as_param_vector(b, a.size)
        super().__init__(n=a.size, m=2)
        self.a = a
        self.b = b

    def _evaluate(self, x):
        return np.array([np.sum((x - self.a) ** 2), np.sum((x - self.b) ** 2)])

    def _gradients(self, x):
        return np.vstack([2.0 * (x - self.a), 2.0 * (x - self.b)])

    def _hvp(self, x, alpha, v):
        return 2.0 * np.sum(alpha) * v

    def pareto_point(self, lam) -> np.ndarray:
        """Point a + λ(b - a) du segment de Pareto"""
        return self.a + lam * (self.b - self.a)

    def set_distance(self, x) -> float:
        """Distance euclidienne de x au segment [a, b]"""
        x = as_param_vector(x, self.n)
        direction = self.b - self.a
        lam = np.clip((x - self.a) @ direction / (direction @ direction), 0.0, 1.0)
        return float(np.linalg.norm(x - self.pareto_point(lam)))

    def tangent(self) -> np.ndarray:
        direction = self.b - self.a
        return direction / np.linalg.norm(direction)

    def initial_point(self, rng) -> np.ndarray:
        center = (self.a + self.b) / 2.0
        spread = max(np.linalg.norm(self.b - self.a), 1.0)
        return center + rng.normal(scale=spread, size=self.n)


class RankDeficientQuadratic(ProblemHandle):
    """
    f1 = (x1 - 1)², f2 = (x1 + 1)² (n = 3)

    Avec curved_dims > 0, on ajoute Σ x_j² (j > 3) aux deux objectifs :
    le noyau de H reste {e2, e3} mais l'image d'une courbe n'est plus
    confinée à une seule courbe de R², ce qui rend visible la différence
    de courbure pour une direction hors du noyau.
    """

    name = 'rank-deficient'

    def __init__(self, curved_dims=0):
        if curved_dims < 0:
            raise ConfigurationError("curved_dims doit être >= 0")
        super().__init__(n=3 + int(curved_dims), m=2)
        self.curved_dims = int(curved_dims)

    def _extra(self, x):
        return float(np.sum(x[3:] ** 2))

    def _evaluate(self, x):
        extra = self._extra(x)
        return np.array([(x[0] - 1.0) ** 2 + extra, (x[0] + 1.0) ** 2 + extra])

    def _gradients(self, x):
        grads = np.zeros((2, self.n))
        grads[0, 0] = 2.0 * (x[0] - 1.0)
        grads[1, 0] = 2.0 * (x[0] + 1.0)
        grads[:, 3:] = 2.0 * x[3:]
        return grads

    def _hvp(self, x, alpha, v):
        out = np.zeros(self.n)
        out[0] = 2.0 * v[0]
        out[3:] = 2.0 * v[3:]
        return np.sum(alpha) * out

    def initial_point(self, rng) -> np.ndarray:
        return rng.normal(size=self.n)
