# src/benchmarks/zdt2.py

"""
Variante de ZDT2 (n = 3, m = 2) avec front et ensemble de Pareto analytiques

    y1 = (sin(x1 + x2² + x3²) + 1) / 2
    y2 = y3 = (cos(x2² + x3²) + 1) / 2
    g  = 1 + 9/2 (y2 + y3)
    f1 = y1
    f2 = g - y1² / g

Front : f2 = 1 - f1², f1 ∈ [0, 1]
Ensemble : cylindres concentriques x2² + x3² = (2k+1)π

Les dérivées passent par les variables intermédiaires s = x1 + r et
r = x2² + x3² : ∇f = Jᵀ (∂f/∂s, ∂f/∂r) et ∇²f = Jᵀ M J + (∂f/∂s + ∂f/∂r) D
avec J = [∇s; ∇r] et D = ∇²s = ∇²r = 2 diag(0, 1, 1).
"""

import numpy as np

from src.core.problem import ProblemHandle
from src.core.types import as_objective_values, as_param_vector

_D = np.diag([0.0, 2.0, 2.0])


def _partials(x):
    """Dérivées de (f1, f2) par rapport à (s, r) jusqu'à l'ordre 2"""
    r = x[1] ** 2 + x[2] ** 2
    s = x[0] + r
    y1 = (np.sin(s) + 1.0) / 2.0
    y1_s = np.cos(s) / 2.0
    y1_ss = -np.sin(s) / 2.0
    g = 1.0 + 9.0 * (np.cos(r) + 1.0) / 2.0
    g_r = -9.0 * np.sin(r) / 2.0
    g_rr = -9.0 * np.cos(r) / 2.0

    first = np.array([
        [y1_s, 0.0],
        [-2.0 * y1 * y1_s / g, g_r * (1.0 + y1 ** 2 / g ** 2)],
    ])
    f2_ss = -2.0 * (y1_s ** 2 + y1 * y1_ss) / g
    f2_sr = 2.0 * y1 * y1_s * g_r / g ** 2
    f2_rr = g_rr * (1.0 + y1 ** 2 / g ** 2) - 2.0 * y1 ** 2 * g_r ** 2 / g ** 3
    second = np.array([
        [[y1_ss, 0.0], [0.0, 0.0]],
        [[f2_ss, f2_sr], [f2_sr, f2_rr]],
    ])
    jacobian = np.array([
        [1.0, 2.0 * x[1], 2.0 * x[2]],
        [0.0, 2.0 * x[1], 2.0 * x[2]],
    ])
    return first, second, jacobian


def zdt2_eval(x) -> np.ndarray:
    """Objectifs (f1, f2) de la variante ZDT2"""
    x = as_param_vector(x, 3)
    y1 = (np.sin(x[0] + x[1] ** 2 + x[2] ** 2) + 1.0) / 2.0
    y2 = (np.cos(x[1] ** 2 + x[2] ** 2) + 1.0) / 2.0
    y3 = y2
    g = 1.0 + 9.0 / 2.0 * (y2 + y3)
    return np.array([y1, g - y1 ** 2 / g])


def zdt2_gradients(x) -> np.ndarray:
    x = as_param_vector(x, 3)
    first, _, jacobian = _partials(x)
    return first @ jacobian


def zdt2_hvp(x, alpha, v) -> np.ndarray:
    x = as_param_vector(x, 3)
    first, second, jacobian = _partials(x)
    jv = jacobian @ v
    out = np.zeros(3)
    for i, weight in enumerate(alpha):
        out += weight * (jacobian.T @ (second[i] @ jv) + first[i].sum() * (_D @ v))
    return out


def zdt2_front_residual(f) -> float:
    """
    Distance verticale au front f2 = 1 - f1²

    Returns:
        |f2 - (1 - f1²)| si f1 ∈ [0, 1], +inf sinon
    """
    f = as_objective_values(f, 2)
    if not 0.0 <= f[0] <= 1.0:
        return float('inf')
    return float(abs(f[1] - (1.0 - f[0] ** 2)))


def zdt2_set_residual(x, k=0) -> float:
    """
    Distance |x2² + x3² - (2k+1)π| au cylindre k

    Args:
        x: Point de R³
        k: Indice du cylindre (0 = le plus intérieur), None = le plus proche

    Returns:
        float
    """
    x = as_param_vector(x, 3)
    r = x[1] ** 2 + x[2] ** 2
    if k is not None:
        return float(abs(r - (2 * k + 1) * np.pi))
    nearest = max(0, int(round((r / np.pi - 1.0) / 2.0)))
    candidates = {max(0, nearest - 1), nearest, nearest + 1}
    return float(min(abs(r - (2 * c + 1) * np.pi) for c in candidates))


def zdt2_on_stationary_ray(f, tol=1e-6) -> bool:
    """Segment f1 = 0, f2 >= 1 : Pareto stationnaire mais pas Pareto optimal"""
    f = as_objective_values(f, 2)
    return bool(abs(f[0]) <= tol and f[1] >= 1.0 - tol)


def zdt2_pareto_point(x1, theta, k=0) -> np.ndarray:
    """Point exact de l'ensemble de Pareto (cylindre k, angle theta)"""
    radius = np.sqrt((2 * k + 1) * np.pi)
    return np.array([x1, radius * np.cos(theta), radius * np.sin(theta)])


class Zdt2Variant(ProblemHandle):
    """Oracle analytique de la variante ZDT2"""

    name = 'zdt2'

    def __init__(self):
        super().__init__(n=3, m=2)

    def _evaluate(self, x):
        return zdt2_eval(x)

    def _gradients(self, x):
        return zdt2_gradients(x)

    def _hvp(self, x, alpha, v):
        return zdt2_hvp(x, alpha, v)

    def initial_point(self, rng) -> np.ndarray:
        """Point de départ aléatoire au voisinage du cylindre intérieur"""
        radius = np.sqrt(np.pi * rng.uniform(0.7, 1.3))
        theta = rng.uniform(0.0, 2.0 * np.pi)
        return np.array([rng.uniform(-0.5, 0.5), radius * np.cos(theta), radius * np.sin(theta)])
