"""
Hiérarchie d'exceptions du solveur
Erreurs de validation, d'analyse, d'hypothèses et de non-convergence
"""

from typing import Any, Dict, List, Optional


class PlapError(Exception):
    """Erreur de base du solveur p-Laplacien"""


class ValidationError(PlapError, ValueError):
    """Erreur sémantique (paramètre hors plage, combinaison interdite...)"""

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        self.key = key
        self.line = line
        self.reason = message
        location = []
        if key is not None:
            location.append(f"clé '{key}'")
        if line is not None:
            location.append(f"ligne {line}")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)


class ParseError(PlapError, ValueError):
    """Erreur de syntaxe dans un fichier de configuration"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"ligne {line}: {message}"
        super().__init__(message)


class InvalidProblem(PlapError, ValueError):
    """Une hypothèse structurelle est violée (0 ∉ A(0), dimensions incompatibles)"""


class OutOfDomainError(PlapError, ValueError):
    """Point hors de l'adhérence du domaine d'un opérateur monotone"""


class NonConvergence(PlapError, RuntimeError):
    """
    Échec d'un solveur itératif

    Porte le meilleur itéré rencontré, l'historique des résidus et, pour la
    continuation, le λ fautif et l'historique partiel.
    """

    def __init__(
        self,
        message: str,
        best_iterate: Any = None,
        residual_history: Optional[List[float]] = None,
        lam: Optional[float] = None,
        continuation_history: Optional[List[Any]] = None,
    ):
        super().__init__(message)
        self.best_iterate = best_iterate
        self.residual_history = list(residual_history or [])
        self.lam = lam
        self.continuation_history = list(continuation_history or [])

    def to_dict(self) -> Dict[str, Any]:
        return {
            'message': str(self),
            'lambda': self.lam,
            'residual_history': self.residual_history,
            'continuation_steps': len(self.continuation_history),
        }
