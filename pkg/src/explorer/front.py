# src/explorer/front.py

"""
Paramétrisation continue des solutions explorées

- chaîne (m = 2, K = 1) : ensemble linéaire par morceaux, t ∈ [-1, 1]
- patch : enveloppe convexe S(x*) = {x* + Σ r_j (x_j - x*), r >= 0, Σ r <= 1}
- couture : plusieurs chaînes échantillonnées, parties dominées rognées
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from loguru import logger

from src.core.dominance import dominance_matrix
from src.core.exceptions import DimensionError, DomainError, FrontStructureError

CHAIN = 'chain'
PATCH = 'patch'
DEFAULT_GRID = 201
PATCH_STEPS = 10


@dataclass(frozen=True)
class FrontParametrization:
    kind: str
    node_ids: tuple
    xs: np.ndarray
    fs: np.ndarray
    knots: Optional[np.ndarray] = None
    center_id: Optional[int] = None
    child_ids: tuple = ()

    @property
    def size(self) -> int:
        return len(self.node_ids)

    def to_dict(self) -> dict:
        data = {'kind': self.kind, 'node_ids': [int(i) for i in self.node_ids]}
        if self.kind == CHAIN:
            data['knots'] = [float(t) for t in self.knots]
        else:
            data['center_id'] = int(self.center_id)
            data['child_ids'] = [int(i) for i in self.child_ids]
        return data


@dataclass(frozen=True)
class StitchPoint:
    segment: int
    t: float
    partner: int
    partner_t: float


@dataclass(frozen=True)
class CropEntry:
    segment: int
    t_start: float
    t_end: float
    dominated_by: int


@dataclass
class StitchedFront:
    segments: list = field(default_factory=list)
    t_grids: list = field(default_factory=list)
    samples: list = field(default_factory=list)
    retained: list = field(default_factory=list)
    stitch_points: list = field(default_factory=list)
    crop_log: list = field(default_factory=list)

    def retained_measure(self, segment) -> float:
        """Longueur en t de la partie conservée d'un segment"""
        grid = self.t_grids[segment]
        if grid.size < 2:
            return 0.0
        step = (grid[-1] - grid[0]) / (grid.size - 1)
        return float(self.retained[segment].sum() * step)

    def retained_points(self) -> np.ndarray:
        kept = [samples[mask] for samples, mask in zip(self.samples, self.retained)]
        if not kept:
            return np.empty((0, 0))
        return np.vstack(kept)


def _check_links(records):
    ids = {record.id for record in records}
    for record in records:
        if record.parent_id is not None and record.parent_id not in ids:
            raise FrontStructureError(f"Parent {record.parent_id} du record {record.id} introuvable")


def build_chain(records) -> FrontParametrization:
    """
    Chaîne linéaire par morceaux (m = 2)

    Les nœuds sont triés par f1 croissant ; t suit la longueur d'arc
    dans l'espace des objectifs, de -1 à 1.

    Args:
        records: ParetoRecord reliés par leurs parents

    Returns:
        FrontParametrization (kind = chain)
    """
    records = list(records)
    if not records:
        raise FrontStructureError("Chaîne vide")
    if any(record.f.size != 2 for record in records):
        raise DimensionError("Une chaîne demande m = 2")
    _check_links(records)
    roots = [record for record in records if record.parent_id is None]
    if len(roots) > 1:
        raise FrontStructureError(f"{len(roots)} graines dans une même chaîne")

    ordered = sorted(records, key=lambda record: (record.f[0], record.f[1]))
    unique = [ordered[0]]
    for record in ordered[1:]:
        if np.array_equal(record.f, unique[-1].f):
            logger.warning(f"⚠️ Record {record.id} : objectifs identiques au record {unique[-1].id}, ignoré")
            continue
        unique.append(record)

    for a, b in zip(unique, unique[1:]):
        if a.parent_id != b.id and b.parent_id != a.id:
            logger.debug(f"Nœuds consécutifs {a.id} et {b.id} sans lien direct")

    fs = np.array([record.f for record in unique])
    if len(unique) == 1:
        knots = np.zeros(1)
    else:
        lengths = np.cumsum(np.r_[0.0, np.linalg.norm(np.diff(fs, axis=0), axis=1)])
        knots = -1.0 + 2.0 * lengths / lengths[-1]
        knots[-1] = 1.0

    return FrontParametrization(kind=CHAIN, node_ids=tuple(record.id for record in unique),
                                xs=np.array([record.x for record in unique]), fs=fs, knots=knots)


def build_patch(records, center_id) -> FrontParametrization:
    """
    Enveloppe convexe d'un nœud et de ses enfants

    Args:
        records: ParetoRecord de l'exploration
        center_id: Identifiant du centre x*

    Returns:
        FrontParametrization (kind = patch)
    """
    records = list(records)
    _check_links(records)
    by_id = {record.id: record for record in records}
    if center_id not in by_id:
        raise FrontStructureError(f"Centre {center_id} introuvable")
    children = [record for record in records if record.parent_id == center_id]
    if not children:
        raise FrontStructureError(f"Le record {center_id} n'a pas d'enfant")

    nodes = [by_id[center_id]] + children
    return FrontParametrization(kind=PATCH, node_ids=tuple(record.id for record in nodes),
                                xs=np.array([record.x for record in nodes]),
                                fs=np.array([record.f for record in nodes]),
                                center_id=center_id, child_ids=tuple(record.id for record in children))


def _chain_weights(p, t):
    if not -1.0 <= t <= 1.0:
        raise DomainError(f"t = {t} hors de [-1, 1]")
    if p.knots.size == 1:
        if t != 0.0:
            raise DomainError("Chaîne dégénérée : seul t = 0 est défini")
        return 0, 0, 0.0
    j = int(np.searchsorted(p.knots, t, side='right')) - 1
    j = min(max(j, 0), p.knots.size - 2)
    w = (t - p.knots[j]) / (p.knots[j + 1] - p.knots[j])
    return j, j + 1, w


def _patch_weights(p, r):
    r = np.asarray(r, dtype=np.float64).reshape(-1)
    if r.size != len(p.child_ids):
        raise DimensionError(f"r de longueur {r.size}, attendu {len(p.child_ids)}")
    if np.any(r < 0) or r.sum() > 1.0 + 1e-12:
        raise DomainError(f"r hors du simplexe : {r}")
    return r


def sample_parametrization(p: FrontParametrization, t=None, r=None) -> np.ndarray:
    """
    Point de l'ensemble paramétré

    Args:
        p: FrontParametrization
        t: Paramètre de chaîne dans [-1, 1]
        r: Poids du patch (r >= 0, Σr <= 1)

    Returns:
        ParamVector (x stocké exactement aux nœuds)
    """
    if p.kind == CHAIN:
        if t is None:
            raise DomainError("Une chaîne s'échantillonne en t")
        a, b, w = _chain_weights(p, float(t))
        if w == 0.0:
            return p.xs[a].copy()
        if w == 1.0:
            return p.xs[b].copy()
        return (1.0 - w) * p.xs[a] + w * p.xs[b]

    if r is None:
        raise DomainError("Un patch s'échantillonne en r")
    r = _patch_weights(p, r)
    if not np.any(r):
        return p.xs[0].copy()
    return p.xs[0] + r @ (p.xs[1:] - p.xs[0])


def sample_front(p: FrontParametrization, grid=DEFAULT_GRID, problem=None):
    """
    Échantillonne une chaîne sur une grille régulière en t

    Sans problème, f est interpolé linéairement entre les nœuds ;
    sinon f(x(t)) est évalué par l'oracle.

    Returns:
        tuple: (t_grid, F de forme (len(t_grid), m))
    """
    if p.kind != CHAIN:
        raise FrontStructureError("Seules les chaînes s'échantillonnent en t")
    if grid < 2:
        raise DomainError("La grille doit contenir au moins 2 points")
    if p.knots.size == 1:
        t_grid = np.zeros(1)
    else:
        t_grid = np.linspace(-1.0, 1.0, grid)

    samples = []
    for t in t_grid:
        if problem is not None:
            samples.append(problem.evaluate(sample_parametrization(p, t=t)))
        else:
            a, b, w = _chain_weights(p, float(t))
            samples.append(p.fs[a] if w == 0.0 else (1.0 - w) * p.fs[a] + w * p.fs[b])
    return t_grid, np.array(samples)


def patch_grid(children, steps=PATCH_STEPS) -> np.ndarray:
    """Grille régulière du simplexe {r >= 0, Σr <= 1} (pas 1/steps)"""
    if steps < 1:
        raise DomainError("Le pas de la grille de patch doit être >= 1")
    counts = [c for c in itertools.product(range(steps + 1), repeat=children) if sum(c) <= steps]
    return np.array(counts, dtype=np.float64) / steps


def sample_patch(p: FrontParametrization, steps=PATCH_STEPS, problem=None):
    """
    Échantillonne un patch sur une grille régulière en r

    Sans problème, f est interpolé linéairement entre le centre et ses enfants ;
    sinon f(x(r)) est évalué par l'oracle.

    Returns:
        tuple: (r_grid de forme (k, enfants), F de forme (k, m))
    """
    if p.kind != PATCH:
        raise FrontStructureError("Seuls les patchs s'échantillonnent en r")
    r_grid = patch_grid(len(p.child_ids), steps)
    if problem is not None:
        samples = [problem.evaluate(sample_parametrization(p, r=r)) for r in r_grid]
    else:
        samples = [p.fs[0] + r @ (p.fs[1:] - p.fs[0]) for r in r_grid]
    logger.debug(f"Patch {p.center_id} : {len(r_grid)} échantillons")
    return r_grid, np.array(samples)


def _runs(mask):
    """Intervalles [début, fin] des indices True consécutifs"""
    runs = []
    start = None
    for i, value in enumerate(mask):
        if value and start is None:
            start = i
        if not value and start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, len(mask) - 1))
    return runs


def stitch_fronts(fronts, grid=DEFAULT_GRID, problem=None) -> StitchedFront:
    """
    Coud plusieurs chaînes : rogne les échantillons dominés

    Args:
        fronts: Liste de FrontParametrization (chaînes)
        grid: Nombre de points de la grille en t par chaîne
        problem: Oracle pour évaluer f(x(t)) (interpolation des nœuds si None)

    Returns:
        StitchedFront
    """
    fronts = list(fronts)
    stitched = StitchedFront(segments=fronts)
    if not fronts:
        return stitched
    if any(front.kind != CHAIN for front in fronts):
        raise FrontStructureError("La couture ne s'applique qu'aux chaînes")

    for front in fronts:
        t_grid, samples = sample_front(front, grid, problem)
        stitched.t_grids.append(t_grid)
        stitched.samples.append(samples)

    owner = np.concatenate([np.full(len(samples), i) for i, samples in enumerate(stitched.samples)])
    union = np.vstack(stitched.samples)
    dominance = dominance_matrix(union)
    dominated = dominance.any(axis=0)

    offset = 0
    for i, samples in enumerate(stitched.samples):
        size = len(samples)
        mask = ~dominated[offset:offset + size]
        stitched.retained.append(mask)
        t_grid = stitched.t_grids[i]

        for start, end in _runs(~mask):
            columns = np.arange(offset + start, offset + end + 1)
            culprits = owner[np.flatnonzero(dominance[:, columns].any(axis=1))]
            others = culprits[culprits != i]
            cause = int(others[0]) if others.size else i
            stitched.crop_log.append(CropEntry(segment=i, t_start=float(t_grid[start]),
                                               t_end=float(t_grid[end]), dominated_by=cause))
            if cause == i:
                continue
            partner_samples = stitched.samples[cause]
            for boundary in (start - 1, end + 1):
                if 0 <= boundary < size and mask[boundary]:
                    distances = np.linalg.norm(partner_samples - samples[boundary], axis=1)
                    partner_mask = ~dominated[owner == cause]
                    if not partner_mask.any():
                        continue
                    distances[~partner_mask] = np.inf
                    j = int(np.argmin(distances))
                    stitched.stitch_points.append(StitchPoint(segment=i, t=float(t_grid[boundary]), partner=cause,
                                                              partner_t=float(stitched.t_grids[cause][j])))
        offset += size

    cropped = sum(int((~mask).sum()) for mask in stitched.retained)
    logger.info(f"📊 Couture de {len(fronts)} chaîne(s) : {cropped} échantillon(s) rogné(s), "
                f"{len(stitched.stitch_points)} point(s) de couture")
    return stitched
