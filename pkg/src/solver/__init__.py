"""
Module solver
Discrétisation, Newton régularisé, continuation λ ↘ 0, certificats et études de convergence
"""

from .problem import ProblemSpec, SolverConfig, SolveReport, ContinuationStep, Verdict
from .discretization import assemble_residual, assemble_jacobian, evaluate_residual
from .newton import solve_regularized
from .continuation import continuation_solve
from .certificates import verify_solution, check_hypotheses, green_identity
from .study import convergence_study, compute_rates, reference_function, StudyTable
from .obstacle import projected_sor, obstacle_reference, complementarity_residual

__all__ = [
    'ProblemSpec', 'SolverConfig', 'SolveReport', 'ContinuationStep', 'Verdict',
    'assemble_residual', 'assemble_jacobian', 'evaluate_residual',
    'solve_regularized', 'continuation_solve',
    'verify_solution', 'check_hypotheses', 'green_identity',
    'convergence_study', 'compute_rates', 'reference_function', 'StudyTable',
    'projected_sor', 'obstacle_reference', 'complementarity_residual',
]
