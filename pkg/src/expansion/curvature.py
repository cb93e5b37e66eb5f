# src/expansion/curvature.py

"""
Courbes images c_d(t) = f(x* + t d), noyau de H et courbure

Ajouter à une direction tangente v un vecteur u du noyau de H(x*) ne change
ni la valeur, ni la tangente, ni la courbure de la courbe image en t = 0.
Ce module fournit de quoi le vérifier numériquement.
"""

import os
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from loguru import logger

from src.core.exceptions import CapabilityError, DimensionError, UndefinedCurvatureError
from src.core.problem import alpha_weights
from src.core.types import as_param_vector

DENSE_CAP = 2000
FD_STEP = 1e-3
IMAGE_CURVE_SCHEMA = 'pareto-image-curve/v1'


@dataclass(frozen=True)
class NullBasis:
    vectors: list = field(default_factory=list)
    eigen_tolerance: float = 1e-8
    eigenvalues: np.ndarray = None
    hessian_norm: float = 0.0

    @property
    def dimension(self) -> int:
        return len(self.vectors)


@dataclass(frozen=True)
class CurvatureReport:
    value_gap: float
    tangent_angle_gap: float
    curvature_gap: float
    kappa_v: float = float('nan')
    kappa_augmented: float = float('nan')


def dense_hessian(problem, x, alpha) -> np.ndarray:
    """H(x) assemblée colonne par colonne (n produits Hessienne-vecteur), symétrisée"""
    x = as_param_vector(x, problem.n)
    weights = alpha_weights(alpha, problem.m)
    columns = [problem.hvp(x, weights, column) for column in np.eye(problem.n)]
    hessian = np.column_stack(columns)
    return 0.5 * (hessian + hessian.T)


def null_space_basis(problem, x, alpha, eigen_tolerance=1e-8, dense_cap=DENSE_CAP) -> NullBasis:
    """
    Base du noyau numérique de H(x) par décomposition spectrale dense

    Args:
        problem: ProblemHandle (n <= dense_cap)
        x: Point
        alpha: Poids de la Hessienne combinée
        eigen_tolerance: Seuil relatif |λ| <= tol × max|λ|
        dense_cap: Taille max de H dense

    Returns:
        NullBasis
    """
    if problem.n > dense_cap:
        raise CapabilityError(f"n = {problem.n} dépasse la limite dense ({dense_cap})")

    eigenvalues, eigenvectors = np.linalg.eigh(dense_hessian(problem, x, alpha))
    scale = float(np.max(np.abs(eigenvalues))) if eigenvalues.size else 0.0
    null = np.abs(eigenvalues) <= eigen_tolerance * scale
    vectors = [eigenvectors[:, j].copy() for j in np.flatnonzero(null)]
    logger.info(f"📊 Noyau de H : dimension {len(vectors)} sur n = {problem.n}")
    return NullBasis(vectors=vectors, eigen_tolerance=eigen_tolerance, eigenvalues=eigenvalues,
                     hessian_norm=scale)


def image_curve_probe(problem, x, d, t_grid) -> list:
    """f(x + t d) pour chaque t de la grille"""
    x = as_param_vector(x, problem.n)
    d = as_param_vector(getattr(d, 'v', d), problem.n)
    t_grid = np.asarray(t_grid, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(t_grid)):
        raise DimensionError("Grille en t non finie")
    return [problem.evaluate(x + t * d) for t in t_grid]


def gradient_probe_directions(grads) -> list:
    """Directions ∇f_i / ‖∇f_i‖ servant de sondes de comparaison"""
    directions = []
    for i, row in enumerate(np.asarray(grads, dtype=np.float64)):
        norm = np.linalg.norm(row)
        if norm == 0.0:
            logger.warning(f"⚠️ Gradient {i + 1} nul : sonde ignorée")
            continue
        directions.append(row / norm)
    return directions


def save_curve_probe_csv(t_grid, values, filename, output_dir='data/probes'):
    """
    Sauvegarde une sonde de courbe image (schema, t, f_1..f_m)

    Returns:
        str: Chemin du fichier sauvegardé
    """
    values = np.asarray(values, dtype=np.float64)
    df = pd.DataFrame(values, columns=[f"f_{i + 1}" for i in range(values.shape[1])])
    df.insert(0, 't', np.asarray(t_grid, dtype=np.float64))
    df.insert(0, 'schema', IMAGE_CURVE_SCHEMA)
    os.makedirs(output_dir, exist_ok=True)
    filepath = os.path.join(output_dir, filename)
    df.to_csv(filepath, index=False)
    logger.success(f"✅ Sonde sauvegardée: {filepath}")
    return filepath


def curvature_kappa(f1p, f2p, f1pp, f2pp) -> float:
    """
    Courbure signée d'une courbe plane t ↦ (f1(t), f2(t))

        κ = (f1′f2″ - f2′f1″) / (f1′² + f2′²)^{3/2}
    """
    speed_sq = f1p ** 2 + f2p ** 2
    if speed_sq == 0.0:
        logger.error("❌ Tangente nulle : courbure non définie")
        raise UndefinedCurvatureError("Tangente nulle, courbure non définie")
    return float((f1p * f2pp - f2p * f1pp) / speed_sq ** 1.5)


def _curve_derivatives(problem, x, d, h):
    """Dérivées première et seconde de c_d en t = 0 (différences centrées à 5 points)"""
    f = np.array(image_curve_probe(problem, x, d, [-2 * h, -h, 0.0, h, 2 * h]))
    first = (f[0] - 8 * f[1] + 8 * f[3] - f[4]) / (12 * h)
    second = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h ** 2)
    return f[2], first, second


def augmentation_check(problem, x, v, u, step=FD_STEP) -> CurvatureReport:
    """
    Compare c_v et c_{v+u} en t = 0 (valeur, direction tangente, courbure)

    Args:
        problem: ProblemHandle avec m = 2
        x: Point de base
        v: Direction (TangentDirection ou vecteur)
        u: Vecteur ajouté à v
        step: Pas des différences finies

    Returns:
        CurvatureReport
    """
    if problem.m != 2:
        raise DimensionError(f"La courbure d'une courbe image demande m = 2 (m = {problem.m})")
    v = as_param_vector(getattr(v, 'v', v), problem.n)
    u = as_param_vector(u, problem.n)

    value_v, first_v, second_v = _curve_derivatives(problem, x, v, step)
    value_w, first_w, second_w = _curve_derivatives(problem, x, v + u, step)

    kappa_v = curvature_kappa(first_v[0], first_v[1], second_v[0], second_v[1])
    kappa_w = curvature_kappa(first_w[0], first_w[1], second_w[0], second_w[1])

    # angle non orienté entre les deux tangentes images, ramené dans [0, π/2]
    cross = first_v[0] * first_w[1] - first_v[1] * first_w[0]
    angle = float(np.arctan2(abs(cross), abs(first_v @ first_w)))

    return CurvatureReport(
        value_gap=float(np.linalg.norm(value_v - value_w)),
        tangent_angle_gap=angle,
        curvature_gap=float(abs(kappa_v - kappa_w)),
        kappa_v=kappa_v,
        kappa_augmented=kappa_w,
    )
