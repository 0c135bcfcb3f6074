"""
Étude de convergence en maillage contre une solution manufacturée
"""

import logging
from dataclasses import dataclass, field
from math import log
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from ..core.exceptions import ValidationError
from .continuation import continuation_solve
from .problem import ProblemSpec, SolverConfig

logger = logging.getLogger(__name__)


def _first_axis(dim: int, value: float) -> np.ndarray:
    out = np.zeros(dim)
    out[0] = value
    return out


# Solutions exactes des champs manufacturés (première composante)
REFERENCE_SOLUTIONS: Dict[str, Callable[[float, float], float]] = {
    'msin': lambda t, T: float(np.sin(np.pi * t / T)),
    'plap3': lambda t, T: t * (T - t),
    'zero': lambda t, T: 0.0,
}


def reference_function(name: str, dim: int, T: float) -> Callable[[float], np.ndarray]:
    """Fonction t ↦ x(t) ∈ ℝᴺ pour une référence nommée"""
    if name not in REFERENCE_SOLUTIONS:
        raise ValidationError(f"solution de référence inconnue: {name}", key='outputs.reference')
    scalar = REFERENCE_SOLUTIONS[name]
    return lambda t: _first_axis(dim, scalar(t, T))


def compute_rates(h_list: Sequence[float], err_list: Sequence[float]) -> List[Optional[float]]:
    """Ordres log(e_{k−1}/e_k)/log(h_{k−1}/h_k) ; None si une erreur est nulle"""
    rates: List[Optional[float]] = [None]
    for k in range(1, len(h_list)):
        if err_list[k] > 0 and err_list[k - 1] > 0:
            rates.append(log(err_list[k - 1] / err_list[k]) / log(h_list[k - 1] / h_list[k]))
        else:
            rates.append(None)
    return rates


@dataclass
class StudyTable:
    """Erreurs nodales maximales et ordres estimés par grille"""
    grids: List[int]
    steps: List[float]
    errors: List[float]
    orders: List[Optional[float]] = field(default_factory=list)

    def rows(self) -> List[Dict[str, Any]]:
        return [{'n': n, 'h': h, 'error': e, 'order': o}
                for n, h, e, o in zip(self.grids, self.steps, self.errors, self.orders)]

    def format_table(self, title: str = 'Étude de convergence') -> str:
        lines = ['', '=' * 48, f'  {title}', '=' * 48,
                 f"{'n':>6s}  {'h':>10s}  {'erreur max':>12s}  {'ordre':>6s}", '-' * 48]
        for row in self.rows():
            order = f"{row['order']:.2f}" if row['order'] is not None else '---'
            lines.append(f"{row['n']:6d}  {row['h']:10.6f}  {row['error']:12.4e}  {order:>6s}")
        lines.append('=' * 48)
        return '\n'.join(lines)


def convergence_study(spec: ProblemSpec, grid_sequence: Sequence[int], config: SolverConfig,
                      reference: Callable[[float], np.ndarray]) -> StudyTable:
    """
    Résout sur une suite de grilles doublées et mesure l'erreur nodale maximale

    Args:
        spec: Problème manufacturé
        grid_sequence: Nombres d'intervalles, chacun double du précédent
        config: Paramètres du solveur (n est remplacé grille par grille)
        reference: Solution exacte t ↦ x(t)

    Returns:
        StudyTable: Erreurs et ordres log₂(e_k/e_{k+1})
    """
    grids = [int(n) for n in grid_sequence]
    if len(grids) < 2 or any(b != 2 * a for a, b in zip(grids, grids[1:])):
        raise ValidationError(f"grilles d'étude non doublées: {grids}", key='outputs.study_grids')

    errors, steps = [], []
    for n in grids:
        report = continuation_solve(spec, config.with_grid(n))
        traj = report.trajectory
        exact = np.vstack([np.atleast_1d(reference(t)) for t in traj.times])
        error = float(np.max(np.linalg.norm(traj.values - exact, axis=1)))
        errors.append(error)
        steps.append(traj.grid.h)
        logger.info(f"n={n}: erreur max = {error:.4e}")

    return StudyTable(grids=grids, steps=steps, errors=errors, orders=compute_rates(steps, errors))
