"""
Oracle indépendant pour l'inégalité variationnelle d'obstacle
Sur-relaxation successive projetée (PSOR) sur le problème de complémentarité linéaire discret
"""

import logging
from typing import Optional, Tuple

import numpy as np

from ..core.exceptions import NonConvergence, ValidationError
from ..core.grid import Grid
from .problem import ProblemSpec

logger = logging.getLogger(__name__)


def complementarity_residual(values: np.ndarray, multiplier: np.ndarray) -> float:
    """
    max_i |min(x_i, u_i)| avec u = −A_λ(x) ≥ 0 (multiplicateur de l'inégalité)

    Args:
        values: Trajectoire (n+1, N)
        multiplier: Trace A_λ(x_i) (n+1, N)
    """
    return float(np.max(np.abs(np.minimum(values, -multiplier))))


def projected_sor(matrix: np.ndarray, q: np.ndarray, omega: Optional[float] = None,
                  tol: float = 1e-15, max_sweeps: int = 200000) -> Tuple[np.ndarray, int]:
    """
    Résout le LCP x ≥ 0, Kx + q ≥ 0, (x, Kx + q) = 0 par PSOR

    Args:
        matrix: K symétrique définie positive (dense)
        q: Second membre
        omega: Facteur de relaxation dans ]0, 2[
        tol: Arrêt sur la variation maximale d'un balayage
        max_sweeps: Nombre maximal de balayages

    Returns:
        Tuple: Solution et nombre de balayages
    """
    K = np.asarray(matrix, dtype=float)
    q = np.asarray(q, dtype=float)
    size = q.size
    omega = 1.5 if omega is None else float(omega)
    if not 0 < omega < 2:
        raise ValidationError(f"ω doit être dans ]0, 2[, reçu {omega}", key='omega')
    x = np.zeros(size)
    diag = np.diag(K).copy()
    for sweep in range(1, max_sweeps + 1):
        change = 0.0
        for i in range(size):
            updated = max(0.0, x[i] - omega * (K[i] @ x + q[i]) / diag[i])
            change = max(change, abs(updated - x[i]))
            x[i] = updated
        if change <= tol * max(1.0, float(np.max(np.abs(x)))):
            return x, sweep
    raise NonConvergence(f"PSOR non convergé après {max_sweeps} balayages", best_iterate=x)


def obstacle_reference(spec: ProblemSpec, n: int, omega: Optional[float] = None) -> np.ndarray:
    """
    Solution de référence du problème d'obstacle scalaire (p = 2, A = N_{ℝ₊}, extrémités nulles)

    Le LCP discret s'écrit w = Kx + f ≥ 0, x ≥ 0, x·w = 0 avec
    K = tridiag(−1, 2, −1)/h² et f_i = F(t_i).

    Returns:
        np.ndarray: Valeurs nodales (n+1, 1)
    """
    if spec.N != 1 or spec.p.p != 2.0 or spec.A.kind != 'orthant-cone':
        raise ValidationError("oracle PSOR: N = 1, p = 2 et A = N_{ℝ₊} requis")
    zero = np.zeros(2)
    if np.linalg.norm(spec.xi.resolvent(1.0, np.array([1.0, -2.0]))) > 0 or \
            np.linalg.norm(spec.xi.resolvent(1.0, zero)) > 0:
        raise ValidationError("oracle PSOR: extrémités de Dirichlet homogènes requises")
    grid = Grid(spec.T, n)
    h = grid.h
    interior = grid.nodes[1:-1]
    size = n - 1
    K = (2.0 * np.eye(size) - np.eye(size, k=1) - np.eye(size, k=-1)) / h ** 2
    f = np.array([spec.F(t, np.zeros(1))[0] for t in interior])
    if omega is None:
        omega = 2.0 / (1.0 + np.sin(np.pi * h))
    x, sweeps = projected_sor(K, f, omega)
    logger.info(f"Oracle PSOR: {sweeps} balayages (n={n}, ω={omega:.4f})")
    values = np.zeros((n + 1, 1))
    values[1:-1, 0] = x
    return values
