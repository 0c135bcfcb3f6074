"""
Discrétisation conservative du problème régularisé et tronqué
Résidu en forme flux aux demi-nœuds, lignes de bord par résolvante, jacobienne creuse
"""

import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from scipy import sparse

from ..core.boundary import BCResidual, bc_residual
from ..core.exceptions import ValidationError
from ..core.fields import radial_retraction
from ..core.grid import Grid, TrajectoryGrid, phi
from .problem import ProblemSpec, SolverConfig

logger = logging.getLogger(__name__)

FD_STEP = np.sqrt(np.finfo(float).eps)


def phi_smoothed(p: float, zeta: np.ndarray, epsilon: float) -> np.ndarray:
    """φ_ε(ζ) = (‖ζ‖² + ε²)^{(p−2)/2} ζ, utilisé seulement dans la jacobienne"""
    if p == 2.0:
        return np.array(zeta, dtype=float, copy=True)
    sq = np.sum(zeta * zeta, axis=-1, keepdims=True) + epsilon * epsilon
    return sq ** (0.5 * (p - 2.0)) * zeta


@dataclass
class ResidualParts:
    """Résidu nodal (n+1, N) et termes qui le composent"""
    residual: np.ndarray
    flux: np.ndarray
    multiplier: np.ndarray
    selection: np.ndarray
    bc: BCResidual
    scale: float

    @property
    def inf_norm(self) -> float:
        return float(np.max(np.abs(self.residual)))

    @property
    def l2_norm(self) -> float:
        return float(np.linalg.norm(self.residual))


def evaluate_residual(spec: ProblemSpec, lam: float, values: np.ndarray, grid: Grid, mu: float,
                      epsilon: Optional[float] = None, include_yosida: bool = True) -> ResidualParts:
    """
    Évalue le résidu discret et ses composantes

    Ligne intérieure i : (φ(d_{i+1/2}) − φ(d_{i−1/2}))/h − A_λ(x_i) − f_i − (φ(x_i) − φ(p_M(x_i))),
    avec f_i = select(t_i, p_M(x_i)) si M est fixé. Lignes 0 et n : résidu de bord.

    Args:
        spec: Problème
        lam: Paramètre de Yosida λ > 0
        values: Valeurs nodales (n+1, N)
        grid: Grille
        mu: Paramètre de la résolvante de bord
        epsilon: Si fourni, flux lissés φ_ε (évaluation jacobienne)
        include_yosida: Inclut −A_λ(x_i) dans les lignes intérieures

    Returns:
        ResidualParts: Résidu et termes
    """
    p = spec.p.p
    h = grid.h
    d = np.diff(values, axis=0) / h
    flux = phi(p, d) if epsilon is None else phi_smoothed(p, d, epsilon)

    if spec.M is not None:
        anchored = radial_retraction(spec.M, values)
        correction = phi(p, values) - phi(p, anchored)
    else:
        anchored = values
        correction = None

    selection = spec.F.trace(grid.nodes, anchored)
    multiplier = spec.A.yosida(lam, values) if include_yosida else np.zeros_like(values)

    residual = np.empty_like(values)
    residual[1:-1] = (flux[1:] - flux[:-1]) / h - selection[1:-1]
    if include_yosida:
        residual[1:-1] -= multiplier[1:-1]
    if correction is not None:
        residual[1:-1] -= correction[1:-1]

    bc = bc_residual(spec.xi, mu, values[0], values[-1], flux[0], -flux[-1])
    residual[0] = bc.value[:spec.N]
    residual[-1] = bc.value[spec.N:]

    scale = max(float(np.max(np.abs(flux))) / h,
                float(np.max(np.abs(multiplier))),
                float(np.max(np.abs(selection))))
    return ResidualParts(residual=residual, flux=flux, multiplier=multiplier,
                         selection=selection, bc=bc, scale=scale)


def assemble_residual(spec: ProblemSpec, lam: float, epsilon: float, traj: TrajectoryGrid,
                      config: SolverConfig) -> np.ndarray:
    """
    Résidu exact de dimension N(n+1) du problème discrétisé

    ε ne modifie jamais le résidu ; il ne sert qu'à la linéarisation.

    Returns:
        np.ndarray: Résidu aplati, nœud par nœud
    """
    if traj.dim != spec.N:
        raise ValidationError(f"trajectoire de dimension {traj.dim}, N = {spec.N}")
    if not lam > 0:
        raise ValidationError(f"λ doit être > 0, reçu {lam}", key='lambda')
    parts = evaluate_residual(spec, lam, traj.values, traj.grid, config.mu)
    return parts.residual.reshape(-1)


def _column_groups(n: int) -> List[List[int]]:
    """Nœuds perturbés ensemble : 0, 1, n−1, n seuls, puis coloriage j mod 3"""
    groups = [[j] for j in sorted({0, 1, n - 1, n})]
    interior = list(range(2, n - 1))
    for color in range(3):
        members = [j for j in interior if j % 3 == color]
        if members:
            groups.append(members)
    return groups


def _affected_rows(j: int, n: int) -> List[int]:
    rows = set(range(max(1, j - 1), min(n - 1, j + 1) + 1))
    if j in (0, 1, n - 1, n):
        rows.update((0, n))
    return sorted(rows)


def assemble_jacobian(spec: ProblemSpec, lam: float, epsilon: float, values: np.ndarray,
                      grid: Grid, mu: float) -> sparse.csc_matrix:
    """
    Jacobienne creuse par différences finies colorées du résidu lissé

    Le bloc −A_λ est ajouté analytiquement lorsque l'opérateur fournit une
    dérivée généralisée de sa résolvante.

    Returns:
        sparse.csc_matrix: Matrice N(n+1) × N(n+1)
    """
    n, N = grid.n, spec.N
    analytic = spec.A.resolvent_derivative_fn is not None
    base = evaluate_residual(spec, lam, values, grid, mu, epsilon=epsilon,
                             include_yosida=not analytic).residual

    rows, cols, data = [], [], []
    for group in _column_groups(n):
        for k in range(N):
            perturbed = values.copy()
            deltas = {}
            for j in group:
                deltas[j] = FD_STEP * max(1.0, abs(values[j, k]))
                perturbed[j, k] += deltas[j]
            diff = evaluate_residual(spec, lam, perturbed, grid, mu, epsilon=epsilon,
                                     include_yosida=not analytic).residual - base
            for j in group:
                column = j * N + k
                for r in _affected_rows(j, n):
                    for m in range(N):
                        value = diff[r, m] / deltas[j]
                        if value != 0.0:
                            rows.append(r * N + m)
                            cols.append(column)
                            data.append(value)

    if analytic:
        for i in range(1, n):
            block = spec.A.yosida_jacobian(lam, values[i])
            for m in range(N):
                for k in range(N):
                    if block[m, k] != 0.0:
                        rows.append(i * N + m)
                        cols.append(i * N + k)
                        data.append(-block[m, k])

    size = N * (n + 1)
    return sparse.coo_matrix((data, (rows, cols)), shape=(size, size)).tocsc()
