"""
Continuation λ ↘ 0 avec démarrages à chaud et prédicteur sécant
"""

import logging
from typing import List, Optional

import numpy as np

from ..core.exceptions import NonConvergence
from ..core.grid import TrajectoryGrid
from .certificates import verify_solution
from .discretization import evaluate_residual
from .newton import solve_regularized
from .obstacle import complementarity_residual
from .problem import ContinuationStep, ProblemSpec, SolveReport, SolverConfig

logger = logging.getLogger(__name__)


def secant_predictor(spec: ProblemSpec, lam: float, config: SolverConfig, current: TrajectoryGrid,
                     older: np.ndarray, lam_current: float, lam_older: float) -> TrajectoryGrid:
    """
    Prédicteur sécant en λ pour l'étape suivante

    x̂ = x_k + (λ_{k+1} − λ_k)/(λ_k − λ_{k−1})·(x_k − x_{k−1}), retenu seulement si son
    résidu à λ_{k+1} est strictement plus petit que celui du démarrage à chaud x_k.

    Args:
        spec: Problème
        lam: λ_{k+1}
        config: Paramètres du solveur
        current: Solution x_k à λ_k
        older: Valeurs de la solution x_{k−1} à λ_{k−1}
        lam_current: λ_k
        lam_older: λ_{k−1}

    Returns:
        TrajectoryGrid: Itéré initial pour λ_{k+1}
    """
    ratio = (lam - lam_current) / (lam_current - lam_older)
    candidate = current.values + ratio * (current.values - older)
    if not np.all(np.isfinite(candidate)):
        return current
    warm = evaluate_residual(spec, lam, current.values, current.grid, config.mu).inf_norm
    predicted = evaluate_residual(spec, lam, candidate, current.grid, config.mu).inf_norm
    if predicted < warm:
        logger.debug(f"λ={lam:g}: prédicteur sécant retenu (‖r‖∞ {warm:.3e} → {predicted:.3e})")
        return current.with_values(candidate)
    return current


def continuation_solve(spec: ProblemSpec, config: SolverConfig,
                       init: Optional[TrajectoryGrid] = None) -> SolveReport:
    """
    Résout la suite de problèmes régularisés le long du calendrier λ

    Args:
        spec: Problème
        config: Paramètres (calendriers λ et ε, tolérances)
        init: Itéré initial (trajectoire nulle par défaut)

    Returns:
        SolveReport: Rapport au λ final avec historique et verdicts
    """
    grid = spec.grid(config.n)
    current = init if init is not None else TrajectoryGrid.zeros(grid, spec.N)
    history: List[ContinuationStep] = []
    previous: Optional[np.ndarray] = None
    older: Optional[np.ndarray] = None
    report: Optional[SolveReport] = None

    for index, lam in enumerate(config.lambda_schedule):
        epsilon = config.epsilon_for(index, grid.h)
        if older is not None:
            current = secant_predictor(spec, lam, config, current, older,
                                       config.lambda_schedule[index - 1], config.lambda_schedule[index - 2])
        try:
            report = solve_regularized(spec, lam, epsilon, current, config)
        except NonConvergence as e:
            logger.error(f"Continuation interrompue à λ={lam:g}: {e}")
            raise NonConvergence(
                f"continuation interrompue à λ={lam:g}: {e}",
                best_iterate=e.best_iterate,
                residual_history=e.residual_history,
                lam=lam,
                continuation_history=history,
            ) from e

        values = report.trajectory.values
        step_diff = 0.0 if previous is None else float(np.max(np.linalg.norm(values - previous, axis=1)))
        complementarity = None
        if spec.A.kind == 'orthant-cone':
            complementarity = complementarity_residual(values, report.multiplier_trace)
        history.append(ContinuationStep(
            lam=lam,
            epsilon=epsilon,
            iterations=report.iterations,
            residual=report.residual_norm,
            step_diff=step_diff,
            used_fallback=report.used_fallback,
            complementarity=complementarity,
        ))
        logger.info(f"λ={lam:g}: {report.iterations} itérations, ‖r‖∞={report.residual_norm:.3e}, "
                    f"écart={step_diff:.3e}")
        older, previous = previous, values
        current = report.trajectory

    report.continuation_history = history
    report.verdicts = verify_solution(spec, report, config)
    return report
