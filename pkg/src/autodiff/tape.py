# src/autodiff/tape.py

"""
Ruban de différentiation pour le petit MLP à deux tâches

- tronc partagé : couches affines + tanh
- une tête affine par tâche, perte softmax-entropie croisée moyennée
- gradients en mode reverse (torch.func.grad / jacrev)
- produits Hessienne-vecteur forward-over-reverse (jvp du gradient) :
  un seul balayage augmenté par produit, coût O(n)

Tout est calculé en float64. Une instance de Tape n'est pas thread-safe
(cache de la dernière passe avant) : un ruban par worker.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import torch
import torch.nn.functional as F
from loguru import logger
from torch.func import grad, jacrev, jvp

from src.core.exceptions import ConfigurationError, DimensionError, NumericOverflowError

DTYPE = torch.float64


def hvp_forward_over_reverse(fn: Callable, x: torch.Tensor, v: torch.Tensor) -> torch.Tensor:
    """
    H(x)v pour une fonction scalaire fn, par dérivée directionnelle du gradient

    Args:
        fn: Fonction tensor -> scalaire
        x: Point
        v: Direction

    Returns:
        Tensor H v
    """
    return jvp(grad(fn), (x,), (v,))[1]


@dataclass(frozen=True)
class TapeNode:
    kind: str
    layer: str = ''


@dataclass(frozen=True)
class ParamSlot:
    name: str
    shape: tuple
    offset: int

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))


class Tape:
    """
    Ruban du MLP : liste de nœuds, table de placement des paramètres
    (index plat → couche/offset) et cache de la dernière passe avant
    """

    def __init__(self, widths, features, labels):
        widths = [int(w) for w in widths]
        if len(widths) < 2 or any(w <= 0 for w in widths):
            raise ConfigurationError(f"Largeurs de couches invalides : {widths}")
        if widths[-1] < 2:
            raise ConfigurationError("Chaque tête doit avoir au moins 2 classes")

        self.widths = widths
        self.features = torch.as_tensor(np.asarray(features), dtype=DTYPE)
        labels = np.asarray(labels)
        if self.features.shape[1] != widths[0]:
            raise ConfigurationError(f"{self.features.shape[1]} features pour une entrée de largeur {widths[0]}")
        self.labels = [torch.as_tensor(labels[:, t], dtype=torch.long) for t in range(labels.shape[1])]
        self.m = len(self.labels)

        self.layout = []
        self.trunk_nodes = []
        self.head_nodes = []
        offset = 0
        for i in range(len(widths) - 2):
            name = f"trunk.{i}"
            for suffix, shape in (('weight', (widths[i + 1], widths[i])), ('bias', (widths[i + 1],))):
                slot = ParamSlot(f"{name}.{suffix}", shape, offset)
                self.layout.append(slot)
                offset += slot.size
            self.trunk_nodes += [TapeNode('affine', name), TapeNode('tanh')]
        for t in range(self.m):
            name = f"head{t}"
            for suffix, shape in (('weight', (widths[-1], widths[-2])), ('bias', (widths[-1],))):
                slot = ParamSlot(f"{name}.{suffix}", shape, offset)
                self.layout.append(slot)
                offset += slot.size
            self.head_nodes.append([TapeNode('affine', name), TapeNode('softmax_xent', name), TapeNode('mean')])
        self.n_params = offset
        self.sweeps = {'forward': 0, 'reverse': 0, 'hvp': 0}
        self._cache_key = None
        self._cache_value = None

    @property
    def nodes(self) -> list:
        return self.trunk_nodes + [node for head in self.head_nodes for node in head]

    def locate(self, index) -> tuple:
        """Index plat → (nom du paramètre, offset local)"""
        for slot in self.layout:
            if slot.offset <= index < slot.offset + slot.size:
                return slot.name, index - slot.offset
        raise DimensionError(f"Index {index} hors de [0, {self.n_params})")

    def unflatten(self, flat: torch.Tensor) -> dict:
        return {slot.name: flat[slot.offset:slot.offset + slot.size].reshape(slot.shape) for slot in self.layout}

    def _replay(self, nodes, params, h, labels=None):
        for node in nodes:
            if node.kind == 'affine':
                h = h @ params[f"{node.layer}.weight"].T + params[f"{node.layer}.bias"]
            elif node.kind == 'tanh':
                h = torch.tanh(h)
            elif node.kind == 'softmax_xent':
                h = F.cross_entropy(h, labels, reduction='none')
            elif node.kind == 'mean':
                h = h.mean()
        return h

    def losses(self, flat: torch.Tensor) -> torch.Tensor:
        """Pertes des m tâches à partir d'une passe avant du tronc partagé"""
        params = self.unflatten(flat)
        hidden = self._replay(self.trunk_nodes, params, self.features)
        return torch.stack([
            self._replay(self.head_nodes[t], params, hidden, self.labels[t]) for t in range(self.m)
        ])

    # ----- conversion numpy <-> torch -----

    def _tensor(self, x) -> torch.Tensor:
        x = np.asarray(x, dtype=np.float64).reshape(-1)
        if x.size != self.n_params:
            raise DimensionError(f"{x.size} paramètres, attendu {self.n_params}")
        return torch.as_tensor(x, dtype=DTYPE)

    @staticmethod
    def _numpy(tensor, label) -> np.ndarray:
        out = tensor.detach().cpu().numpy().astype(np.float64)
        if not np.all(np.isfinite(out)):
            logger.error(f"❌ Valeur non finie dans {label}")
            raise NumericOverflowError(f"Valeur non finie dans {label}")
        return out

    # ----- opérations -----

    def forward(self, x) -> np.ndarray:
        """Pertes (f1, ..., fm) au point x"""
        x = np.asarray(x, dtype=np.float64)
        key = x.tobytes()
        if key == self._cache_key:
            return self._cache_value.copy()
        with torch.no_grad():
            values = self._numpy(self.losses(self._tensor(x)), 'la passe avant')
        self.sweeps['forward'] += 1
        self._cache_key = key
        self._cache_value = values
        return values.copy()

    def gradient(self, x, task_index) -> np.ndarray:
        """∇f_i(x) pour une tâche"""
        if not 0 <= task_index < self.m:
            raise DimensionError(f"Tâche {task_index} inexistante (m = {self.m})")
        out = grad(lambda flat: self.losses(flat)[task_index])(self._tensor(x))
        self.sweeps['reverse'] += 1
        return self._numpy(out, 'le gradient')

    def gradients(self, x) -> np.ndarray:
        """Matrice m×n des gradients (jacobienne en mode reverse)"""
        out = jacrev(self.losses)(self._tensor(x))
        self.sweeps['reverse'] += 1
        return self._numpy(out, 'les gradients')

    def hvp(self, x, alpha, v) -> np.ndarray:
        """H(x)v = Σ α_i ∇²f_i(x) v en un balayage forward-over-reverse"""
        weights = torch.as_tensor(np.asarray(alpha, dtype=np.float64), dtype=DTYPE)
        out = hvp_forward_over_reverse(lambda flat: weights @ self.losses(flat), self._tensor(x), self._tensor(v))
        self.sweeps['hvp'] += 1
        return self._numpy(out, 'le produit Hessienne-vecteur')


def tape_forward(tape: Tape, x) -> np.ndarray:
    return tape.forward(x)


def tape_gradient(tape: Tape, x, task_index) -> np.ndarray:
    return tape.gradient(x, task_index)


def tape_hvp(tape: Tape, x, alpha, v) -> np.ndarray:
    return tape.hvp(x, getattr(alpha, 'alpha', alpha), v)
