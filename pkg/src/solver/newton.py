"""
Résolution du problème régularisé à λ fixé
Newton amorti sur le résidu exact, jacobienne lissée, repli par itérations de corde
"""

import logging
import warnings
from typing import List, Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import MatrixRankWarning, splu, spsolve

from ..core.exceptions import NonConvergence, ValidationError
from ..core.grid import Grid, TrajectoryGrid
from .discretization import ResidualParts, assemble_jacobian, evaluate_residual
from .problem import ProblemSpec, SolveReport, SolverConfig

logger = logging.getLogger(__name__)

ROUNDOFF_FACTOR = 64.0


def stopping_tolerance(values: np.ndarray, parts: ResidualParts, grid: Grid, newton_tol: float) -> float:
    """
    Seuil d'arrêt sur ‖r‖_∞

    newton_tol·(1 + S) augmenté d'un plancher d'arrondi c·eps·max(1, ‖x‖_∞)/h²,
    niveau atteint par les lignes intérieures quand x est exact à l'arrondi près.

    Args:
        values: Valeurs nodales (n+1, N)
        parts: Résidu évalué en values
        grid: Grille
        newton_tol: Tolérance relative demandée

    Returns:
        float: Seuil sur la norme infinie du résidu
    """
    x_scale = max(1.0, float(np.max(np.abs(values)))) if values.size else 1.0
    floor = ROUNDOFF_FACTOR * np.finfo(float).eps * x_scale / grid.h ** 2
    return newton_tol * (1.0 + parts.scale) + floor


class RegularizedNewton:
    """
    Newton amorti pour le système discret à λ et ε fixés

    Le critère d'arrêt porte sur le résidu exact :
    ‖r‖_∞ ≤ newton_tol·(1 + S) + c·eps·max(1, ‖x‖_∞)/h², S échelle des termes du second membre.
    """

    def __init__(self, spec: ProblemSpec, lam: float, epsilon: float, grid: Grid, config: SolverConfig):
        if not lam > 0 or not epsilon > 0:
            raise ValidationError(f"λ et ε doivent être > 0 (λ={lam}, ε={epsilon})", key='lambda')
        self.spec = spec
        self.lam = float(lam)
        self.epsilon = float(epsilon)
        self.grid = grid
        self.config = config
        self.rnorms: List[float] = []
        self.iterations = 0
        self.used_fallback = False
        self.jacobian: Optional[sparse.csc_matrix] = None
        self.best: Optional[Tuple[float, np.ndarray]] = None

    def evaluate(self, values: np.ndarray) -> ResidualParts:
        return evaluate_residual(self.spec, self.lam, values, self.grid, self.config.mu)

    def converged(self, values: np.ndarray, parts: ResidualParts) -> bool:
        return parts.inf_norm <= stopping_tolerance(values, parts, self.grid, self.config.newton_tol)

    def _record(self, values: np.ndarray, parts: ResidualParts):
        self.rnorms.append(parts.inf_norm)
        if self.best is None or parts.inf_norm < self.best[0]:
            self.best = (parts.inf_norm, values.copy())

    def _line_search(self, values: np.ndarray, parts: ResidualParts, direction: np.ndarray,
                     start: float = 1.0) -> Tuple[Optional[np.ndarray], Optional[ResidualParts], float]:
        """Rebroussement : accepte le premier pas qui fait décroître strictement ‖r‖₂"""
        step = start
        while step >= self.config.min_step:
            trial = values + step * direction
            if np.all(np.isfinite(trial)):
                trial_parts = self.evaluate(trial)
                if np.isfinite(trial_parts.l2_norm) and trial_parts.l2_norm < parts.l2_norm:
                    return trial, trial_parts, step
            step *= self.config.damping
        return None, None, step

    def newton(self, values: np.ndarray, parts: ResidualParts) -> Tuple[np.ndarray, ResidualParts]:
        shape = values.shape
        while not self.converged(values, parts) and self.iterations < self.config.newton_max_iters:
            self.jacobian = assemble_jacobian(self.spec, self.lam, self.epsilon, values,
                                              self.grid, self.config.mu)
            try:
                with warnings.catch_warnings():
                    warnings.simplefilter('ignore', MatrixRankWarning)
                    direction = spsolve(self.jacobian, -parts.residual.reshape(-1))
            except RuntimeError as e:
                logger.debug(f"λ={self.lam:g}: jacobienne singulière ({e})")
                break
            if not np.all(np.isfinite(direction)):
                logger.debug(f"λ={self.lam:g}: direction de Newton non finie, arrêt")
                break
            trial, trial_parts, step = self._line_search(values, parts, direction.reshape(shape))
            self.iterations += 1
            if trial is None:
                logger.debug(f"λ={self.lam:g}: stagnation de Newton (pas < {self.config.min_step:g})")
                break
            values, parts = trial, trial_parts
            self._record(values, parts)
            logger.debug(f"λ={self.lam:g} it={self.iterations} ‖r‖∞={parts.inf_norm:.3e} pas={step:g}")
        return values, parts

    def chord(self, values: np.ndarray, parts: ResidualParts) -> Tuple[np.ndarray, ResidualParts]:
        """Itérations de corde x ← x − ω J₀⁻¹ r avec J₀ factorisée une fois"""
        self.used_fallback = True
        logger.warning(f"λ={self.lam:g}: Newton en échec (‖r‖∞={parts.inf_norm:.3e}), repli sur itérations de corde")
        if self.jacobian is None:
            self.jacobian = assemble_jacobian(self.spec, self.lam, self.epsilon, values,
                                              self.grid, self.config.mu)
        try:
            lu = splu(self.jacobian.tocsc())
        except RuntimeError as e:
            logger.error(f"λ={self.lam:g}: factorisation de la jacobienne impossible: {e}")
            return values, parts
        omega = 1.0
        for _ in range(self.config.picard_fallback_iters):
            if self.converged(values, parts):
                break
            direction = lu.solve(-parts.residual.reshape(-1)).reshape(values.shape)
            trial, trial_parts, omega = self._line_search(values, parts, direction, start=omega)
            self.iterations += 1
            if trial is None:
                break
            values, parts = trial, trial_parts
            self._record(values, parts)
            omega = min(1.0, 2.0 * omega)
        return values, parts

    def solve(self, init: TrajectoryGrid) -> Tuple[np.ndarray, ResidualParts]:
        values = np.array(init.values, dtype=float)
        parts = self.evaluate(values)
        self._record(values, parts)
        values, parts = self.newton(values, parts)
        if not self.converged(values, parts):
            values, parts = self.chord(values, parts)
        if not self.converged(values, parts):
            best_norm, best_values = self.best
            raise NonConvergence(
                f"non-convergence à λ={self.lam:g} après {self.iterations} itérations "
                f"(‖r‖∞={best_norm:.3e})",
                best_iterate=TrajectoryGrid(self.grid, best_values),
                residual_history=self.rnorms,
                lam=self.lam,
            )
        return values, parts


def build_report(spec: ProblemSpec, lam: float, epsilon: float, grid: Grid, values: np.ndarray,
                 parts: ResidualParts, config: SolverConfig, iterations: int = 0,
                 residual_history: Optional[List[float]] = None, used_fallback: bool = False) -> SolveReport:
    """Assemble un SolveReport à partir d'une trajectoire et de son résidu"""
    multiplier = parts.multiplier
    membership = spec.A.resolvent(1.0, values + multiplier)
    return SolveReport(
        trajectory=TrajectoryGrid(grid, values),
        flux=parts.flux,
        selection_trace=parts.selection,
        multiplier_trace=multiplier,
        residual_norm=parts.inf_norm,
        bc_residual_norm=parts.bc.norm,
        hartman_max_norm=float(np.max(np.linalg.norm(values, axis=1))),
        graph_membership_residual=float(np.max(np.linalg.norm(values - membership, axis=1))),
        lam=float(lam),
        epsilon=float(epsilon),
        tolerance=stopping_tolerance(values, parts, grid, config.newton_tol),
        iterations=iterations,
        residual_history=list(residual_history or []),
        used_fallback=used_fallback,
        variant=spec.variant,
    )


def solve_regularized(spec: ProblemSpec, lam: float, epsilon: float, init: TrajectoryGrid,
                      config: SolverConfig) -> SolveReport:
    """
    Résout le problème régularisé (A remplacé par A_λ) depuis un itéré initial

    Args:
        spec: Problème
        lam: λ > 0
        epsilon: Lissage de la jacobienne
        init: Itéré initial
        config: Paramètres du solveur

    Returns:
        SolveReport: Trajectoire convergée et diagnostics (sans verdicts)
    """
    if init.dim != spec.N:
        raise ValidationError(f"itéré initial de dimension {init.dim}, N = {spec.N}")
    if init.grid.T != spec.T:
        raise ValidationError(f"itéré initial sur [0, {init.grid.T}], T = {spec.T}")
    if init.grid.n != config.n:
        raise ValidationError(f"itéré initial sur {init.grid.n} intervalles, n = {config.n}", key='solver.n')
    solver = RegularizedNewton(spec, lam, epsilon, init.grid, config)
    values, parts = solver.solve(init)
    return build_report(spec, lam, epsilon, init.grid, values, parts, config,
                        iterations=solver.iterations, residual_history=solver.rnorms,
                        used_fallback=solver.used_fallback)
