# src/core/exceptions.py

"""
Hiérarchie d'exceptions du projet

Deux familles :
- ValidationError : entrée invalide (dimension, configuration, domaine...)
- NumericError : échec numérique (solveur, line search, divergence...)

Les erreurs qui portent un résultat partiel l'exposent en attribut.
"""


class ParetoError(Exception):
    """Racine de toutes les erreurs du projet"""


# ============================================
# ERREURS DE VALIDATION
# ============================================

class ValidationError(ParetoError, ValueError):
    """Entrée invalide fournie par l'appelant"""


class DimensionError(ValidationError):
    """Longueurs de vecteurs incompatibles"""


class ConfigurationError(ValidationError):
    """Hyperparamètres ou architecture invalides"""


class DomainError(ValidationError):
    """Paramètre hors domaine (t hors de [-1, 1], r hors du simplexe...)"""


class ContractError(ValidationError):
    """Un opérateur ne respecte pas son contrat (dimension de sortie...)"""


class FrontStructureError(ValidationError):
    """Liens parents cassés ou structure de front incompatible"""


class CapabilityError(ValidationError):
    """Opération non disponible pour cette taille / ce mode"""


class UsageError(ValidationError):
    """Mauvaise utilisation de la ligne de commande"""


# ============================================
# ERREURS NUMÉRIQUES
# ============================================

class NumericError(ParetoError):
    """Échec numérique pendant un calcul"""


class NumericOverflowError(NumericError):
    """Valeur intermédiaire non finie"""


class SolverError(NumericError):
    """Le solveur du simplexe n'a pas convergé"""

    def __init__(self, message, best_iterate=None):
        super().__init__(message)
        self.best_iterate = best_iterate


class BreakdownError(NumericError):
    """NaN dans la récurrence de MINRES"""

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class DegenerateSampleError(NumericError):
    """Second membre numériquement nul : il faut retirer beta"""


class UndefinedCurvatureError(NumericError):
    """Tangente nulle : courbure non définie"""


class StalledError(NumericError):
    """La line search n'arrive plus à progresser"""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class DivergenceError(NumericError):
    """La descente de gradient diverge"""

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory if trajectory is not None else []
