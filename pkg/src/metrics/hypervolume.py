# src/metrics/hypervolume.py

"""
Hypervolume (minimisation) : mesure de l'union des boîtes [p, ref]

- exact2d : tri + balayage
- exact3d : balayage sur f3 avec aire 2-D incrémentale
- monte_carlo : estimateur uniforme dans la boîte de référence (oracle de validation)
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from loguru import logger

from src.core.exceptions import CapabilityError, ConfigurationError, DimensionError

EXACT2D = 'exact2d'
EXACT3D = 'exact3d'
MONTE_CARLO = 'monte_carlo'
MODES = (EXACT2D, EXACT3D, MONTE_CARLO)
MC_CHUNK = 100_000

# Points de référence par benchmark (consignés dans les manifestes)
DEFAULT_REFERENCES = {
    'zdt2': (1.1, 11.0),
    'toy-mlp': (1.1 * np.log(2.0), 1.1 * np.log(2.0)),
    'two-quadratics': (1.1, 1.1),
    'rank-deficient': (4.4, 4.4),
}


@dataclass(frozen=True)
class HvConfig:
    reference: tuple
    mode: Optional[str] = None
    samples: int = 1_000_000
    seed: int = 0

    def __post_init__(self):
        reference = tuple(float(r) for r in np.asarray(self.reference, dtype=np.float64).reshape(-1))
        if len(reference) < 2 or not np.all(np.isfinite(reference)):
            raise ConfigurationError(f"Point de référence invalide : {self.reference}")
        object.__setattr__(self, 'reference', reference)
        if self.mode is None:
            object.__setattr__(self, 'mode', {2: EXACT2D, 3: EXACT3D}.get(len(reference), MONTE_CARLO))
        if self.mode not in MODES:
            raise ConfigurationError(f"Mode inconnu : {self.mode} ({', '.join(MODES)})")
        if self.samples < 1:
            raise ConfigurationError("samples doit être >= 1")


@dataclass(frozen=True)
class HvEstimate:
    value: float
    std_error: float
    samples: int


def default_reference(benchmark) -> tuple:
    if benchmark not in DEFAULT_REFERENCES:
        raise ConfigurationError(f"Pas de référence par défaut pour {benchmark}")
    return DEFAULT_REFERENCES[benchmark]


def _prepare(points, reference):
    reference = np.asarray(reference, dtype=np.float64)
    points = np.asarray(points, dtype=np.float64)
    if points.size == 0:
        return np.empty((0, reference.size)), reference
    points = points.reshape(-1, points.shape[-1])
    if points.shape[1] != reference.size:
        raise DimensionError(f"Points de dimension {points.shape[1]}, référence de dimension {reference.size}")
    # boîtes écrêtées : un point hors de la référence dans une coordonnée a un volume nul
    inside = np.all(points < reference, axis=1)
    return points[inside], reference


def _area_2d(points, reference) -> float:
    if len(points) == 0:
        return 0.0
    order = np.lexsort((points[:, 1], points[:, 0]))
    area = 0.0
    ceiling = reference[1]
    for p1, p2 in points[order]:
        if p2 < ceiling:
            area += (reference[0] - p1) * (ceiling - p2)
            ceiling = p2
    return float(area)


def _volume_3d(points, reference) -> float:
    if len(points) == 0:
        return 0.0
    points = points[np.argsort(points[:, 2], kind='stable')]
    levels = np.r_[points[:, 2], reference[2]]
    volume = 0.0
    for i in range(len(points)):
        height = levels[i + 1] - levels[i]
        if height > 0:
            volume += _area_2d(points[:i + 1, :2], reference[:2]) * height
    return float(volume)


def hv_monte_carlo(points, reference, samples=1_000_000, seed=0) -> HvEstimate:
    """
    Estimation Monte-Carlo de l'hypervolume

    Args:
        points: Points (k, m)
        reference: Point de référence
        samples: Nombre de tirages uniformes
        seed: Graine

    Returns:
        HvEstimate (valeur et erreur standard)
    """
    points, reference = _prepare(points, reference)
    if len(points) == 0:
        return HvEstimate(0.0, 0.0, samples)
    lower = points.min(axis=0)
    box = float(np.prod(reference - lower))
    if box == 0.0:
        return HvEstimate(0.0, 0.0, samples)

    rng = np.random.default_rng(seed)
    hits = 0
    remaining = samples
    while remaining > 0:
        size = min(MC_CHUNK, remaining)
        draws = rng.uniform(lower, reference, size=(size, reference.size))
        covered = np.zeros(size, dtype=bool)
        for p in points:
            covered |= np.all(draws >= p, axis=1)
        hits += int(covered.sum())
        remaining -= size

    fraction = hits / samples
    return HvEstimate(value=box * fraction, std_error=box * np.sqrt(fraction * (1.0 - fraction) / samples),
                      samples=samples)


def hypervolume(points, cfg: HvConfig) -> float:
    """
    Hypervolume des points par rapport à cfg.reference

    Args:
        points: Liste d'ObjectiveValues de même longueur m
        cfg: HvConfig (mode exact2d / exact3d / monte_carlo)

    Returns:
        float
    """
    m = len(cfg.reference)
    if cfg.mode == MONTE_CARLO:
        estimate = hv_monte_carlo(points, cfg.reference, cfg.samples, cfg.seed)
        logger.debug(f"HV Monte-Carlo : {estimate.value:.6f} ± {estimate.std_error:.2e}")
        return estimate.value
    expected = 2 if cfg.mode == EXACT2D else 3
    if m != expected:
        raise CapabilityError(f"Mode {cfg.mode} indisponible pour m = {m} (utiliser monte_carlo)")

    points, reference = _prepare(points, cfg.reference)
    if cfg.mode == EXACT2D:
        return _area_2d(points, reference)
    return _volume_3d(points, reference)
