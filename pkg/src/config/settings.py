# src/config/settings.py

"""
Paramètres globaux chargés depuis l'environnement (.env)
"""

import os
from dotenv import load_dotenv

load_dotenv()

VERSION = "0.3.0"

# Dossier de sortie des runs (surchargeable par variable d'environnement)
OUTPUT_DIR = os.getenv('PARETO_OUTPUT_DIR', 'data/runs')

LOG_LEVEL = os.getenv('PARETO_LOG_LEVEL', 'INFO')

# Nombre max d'entrées m×n de gradients stockées dans un ParetoRecord
GRAD_STORAGE_CAP = int(os.getenv('PARETO_GRAD_STORAGE_CAP', '1000000'))

# Fichier de configuration par défaut de l'exploration
DEFAULT_CONFIG_PATH = os.getenv('PARETO_CONFIG', 'config/exploration.yaml')


def output_dir():
    """Relit la variable à chaque appel (utile pour les tests)"""
    return os.getenv('PARETO_OUTPUT_DIR', OUTPUT_DIR)
