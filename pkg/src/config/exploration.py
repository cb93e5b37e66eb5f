# src/config/exploration.py

"""
Hyperparamètres de l'exploration (s, k, K, N, β, correction, optimiseur...)

Chargeables depuis un fichier YAML (config/exploration.yaml) ;
les options de la ligne de commande surchargent les valeurs du fichier.
"""

from dataclasses import asdict, dataclass, fields, replace
from typing import Optional

import numpy as np
import yaml

from src.core.exceptions import ConfigurationError
from src.expansion.tangent import BetaStrategy

OPTIMIZERS = ('mgda_linesearch', 'weighted_sum_gd')
EXPANSIONS = ('tangent', 'weighted_sum')


@dataclass(frozen=True)
class ExplorationConfig:
    s: float = 0.1
    k: int = 2
    K: int = 1
    N: int = 10
    beta_strategy: str = BetaStrategy.STANDARD_NORMAL.value
    use_correction: bool = False
    optimizer: str = 'mgda_linesearch'
    weights: Optional[tuple] = None
    lr0: float = 0.005
    ws_iters: int = 50
    mgda_tol: float = 1e-6
    mgda_max_iters: int = 5000
    rng_seed: int = 0
    expansion: str = 'tangent'
    workers: int = 1
    minres_tol: float = 1e-8
    perturb_sigma: float = 0.1

    def __post_init__(self):
        for name in ('s', 'lr0', 'mgda_tol', 'minres_tol'):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} doit être > 0 (reçu {getattr(self, name)})")
        for name in ('k', 'K', 'N', 'ws_iters', 'mgda_max_iters', 'workers'):
            if int(getattr(self, name)) < 1:
                raise ConfigurationError(f"{name} doit être >= 1 (reçu {getattr(self, name)})")
        if self.perturb_sigma < 0:
            raise ConfigurationError("perturb_sigma doit être >= 0")
        if self.optimizer not in OPTIMIZERS:
            raise ConfigurationError(f"Optimiseur inconnu : {self.optimizer} ({', '.join(OPTIMIZERS)})")
        if self.expansion not in EXPANSIONS:
            raise ConfigurationError(f"Expansion inconnue : {self.expansion} ({', '.join(EXPANSIONS)})")
        try:
            object.__setattr__(self, 'beta_strategy', BetaStrategy(self.beta_strategy).value)
        except ValueError:
            raise ConfigurationError(f"Stratégie β inconnue : {self.beta_strategy}") from None

        if self.weights is not None:
            weights = np.asarray(self.weights, dtype=np.float64).reshape(-1)
            if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-9:
                raise ConfigurationError(f"Poids hors du simplexe : {list(weights)}")
            object.__setattr__(self, 'weights', tuple(float(w) for w in weights))
        elif self.optimizer == 'weighted_sum_gd':
            raise ConfigurationError("weighted_sum_gd demande des poids")

    @classmethod
    def from_dict(cls, data: dict) -> 'ExplorationConfig':
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"Clés de configuration inconnues : {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_yaml(cls, path, **overrides) -> 'ExplorationConfig':
        """
        Charge la configuration depuis un fichier YAML

        Args:
            path: Chemin du fichier
            **overrides: Valeurs prioritaires (None = ignorée)

        Returns:
            ExplorationConfig
        """
        with open(path, 'r', encoding='utf-8') as handle:
            data = yaml.safe_load(handle) or {}
        if not isinstance(data, dict):
            raise ConfigurationError(f"{path} ne contient pas un dictionnaire YAML")
        data.update({key: value for key, value in overrides.items() if value is not None})
        return cls.from_dict(data)

    def with_overrides(self, **overrides) -> 'ExplorationConfig':
        return replace(self, **{key: value for key, value in overrides.items() if value is not None})

    def to_dict(self) -> dict:
        data = asdict(self)
        if data['weights'] is not None:
            data['weights'] = list(data['weights'])
        return data

    def to_yaml(self, path):
        with open(path, 'w', encoding='utf-8') as handle:
            yaml.safe_dump(self.to_dict(), handle, sort_keys=False, allow_unicode=True)
