# src/benchmarks/registry.py

"""
Registre des benchmarks disponibles en ligne de commande
"""

from src.core.exceptions import UsageError
from .quadratics import RankDeficientQuadratic, TwoQuadratics
from .toy_mlp import toy_mlp_build
from .zdt2 import Zdt2Variant

BENCHMARKS = {
    'zdt2': lambda seed: Zdt2Variant(),
    'two-quadratics': lambda seed: TwoQuadratics(),
    'rank-deficient': lambda seed: RankDeficientQuadratic(),
    'toy-mlp': lambda seed: toy_mlp_build(seed),
}


def build_benchmark(name, seed=0):
    """
    Instancie un benchmark par son identifiant

    Args:
        name: Identifiant (zdt2, two-quadratics, rank-deficient, toy-mlp)
        seed: Graine (utilisée par toy-mlp pour les données)

    Returns:
        ProblemHandle
    """
    if name not in BENCHMARKS:
        raise UsageError(f"Benchmark inconnu : {name} (disponibles : {', '.join(BENCHMARKS)})")
    return BENCHMARKS[name](seed)

