# src/benchmarks/toy_mlp.py

"""
Petit MLP à deux tâches sur un jeu de données synthétique (blobs gaussiens)

- 200 points, 2 features, 4 blobs centrés en (±1.5, ±1.5)
- tâche 1 : gauche / droite ; tâche 2 : bas / haut
- 10 % des points reçoivent pour la tâche 2 l'étiquette de la tâche 1
- tronc tanh partagé + une tête softmax-entropie croisée par tâche
"""

import os

import numpy as np
import pandas as pd
from loguru import logger
from sklearn.datasets import make_blobs

from src.autodiff.tape import Tape
from src.core.exceptions import ConfigurationError
from src.core.problem import ProblemHandle

BLOB_CENTERS = [(-1.5, -1.5), (-1.5, 1.5), (1.5, -1.5), (1.5, 1.5)]
DEFAULT_WIDTHS = (2, 8, 2)


def make_two_task_blobs(seed, n_samples=200, overlap=0.1):
    """
    Génère le jeu de données à deux canaux d'étiquettes

    Args:
        seed: Graine (détermine entièrement les données)
        n_samples: Nombre de points
        overlap: Fraction de points dont l'étiquette tâche 2 copie la tâche 1

    Returns:
        tuple: (features (n, 2), labels (n, 2) entiers 0/1)
    """
    features, blob = make_blobs(n_samples=n_samples, centers=BLOB_CENTERS, cluster_std=1.0,
                                random_state=seed)
    task1 = np.isin(blob, [2, 3]).astype(np.int64)
    task2 = np.isin(blob, [1, 3]).astype(np.int64)

    rng = np.random.default_rng(seed)
    shared = rng.choice(n_samples, size=int(round(overlap * n_samples)), replace=False)
    task2[shared] = task1[shared]

    return features.astype(np.float64), np.column_stack([task1, task2])


class ToyMlpTwoTask(ProblemHandle):
    """
    MLP tanh à deux têtes, pertes full-batch (déterministes)

    Gradients et produits Hessienne-vecteur délégués au ruban (src.autodiff.tape).
    """

    name = 'toy-mlp'

    def __init__(self, seed=0, widths=DEFAULT_WIDTHS, n_samples=200, overlap=0.1):
        widths = list(widths)
        if any(int(w) <= 0 for w in widths):
            raise ConfigurationError(f"Couche de largeur nulle : {widths}")
        self.seed = int(seed)
        self.features, self.labels = make_two_task_blobs(self.seed, n_samples, overlap)
        self.tape = Tape(widths, self.features, self.labels)
        super().__init__(n=self.tape.n_params, m=self.tape.m)
        self.widths = self.tape.widths

    def _evaluate(self, x):
        return self.tape.forward(x)

    def _gradients(self, x):
        return self.tape.gradients(x)

    def _hvp(self, x, alpha, v):
        return self.tape.hvp(x, alpha, v)

    def task_gradient(self, x, task_index) -> np.ndarray:
        """∇f_i seul (non compté : seul l'ensemble des m gradients l'est)"""
        return self.tape.gradient(x, task_index)

    def initial_point(self, rng=None) -> np.ndarray:
        """Initialisation des poids, fixée par la graine du problème si rng est None"""
        if rng is None:
            rng = np.random.default_rng(self.seed)
        x = np.zeros(self.n)
        for slot in self.tape.layout:
            if slot.name.endswith('.weight'):
                fan_in = slot.shape[1]
                x[slot.offset:slot.offset + slot.size] = rng.normal(scale=1.0 / np.sqrt(fan_in), size=slot.size)
        return x

    def describe(self) -> dict:
        info = super().describe()
        info.update({'widths': self.widths, 'seed': self.seed, 'n_params': self.n})
        return info

    def dataset_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            'feature1': self.features[:, 0],
            'feature2': self.features[:, 1],
            'label_task1': self.labels[:, 0],
            'label_task2': self.labels[:, 1],
        })

    def save_dataset_csv(self, filename=None, output_dir='data/datasets'):
        """
        Exporte le jeu de données en CSV pour inspection

        Args:
            filename: Nom du fichier (auto si None)
            output_dir: Dossier de sortie

        Returns:
            str: Chemin du fichier sauvegardé
        """
        os.makedirs(output_dir, exist_ok=True)
        if filename is None:
            filename = f"toy_mlp_blobs_seed{self.seed}.csv"
        filepath = os.path.join(output_dir, filename)
        df = self.dataset_frame()
        df.to_csv(filepath, index=False)
        logger.success(f"✅ Jeu de données sauvegardé: {filepath} ({len(df)} lignes)")
        return filepath


def toy_mlp_build(seed, widths=DEFAULT_WIDTHS) -> ToyMlpTwoTask:
    """
    Construit le problème MLP à deux tâches

    Args:
        seed: Graine (données et initialisation des poids)
        widths: Largeurs [entrée, couches cachées..., classes par tête]

    Returns:
        ToyMlpTwoTask
    """
    problem = ToyMlpTwoTask(seed=seed, widths=widths)
    logger.info(f"📊 MLP {problem.widths} : {problem.n} paramètres, {problem.m} tâches")
    return problem
