"""
Certificats a posteriori et vérification groupée des hypothèses
Borne de Hartman, identité de Green discrète, borne sur la dérivée, bord, appartenance au graphe
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.boundary import BoundaryOperator, check_h0, check_h_xi, check_zero_in_bc, sample_graph
from ..core.fields import (
    MultiField, check_hartman, check_selection, estimate_growth, lower_semicontinuity_report,
)
from ..core.grid import ExponentLike, TrajectoryGrid, phi
from ..core.monotone import MonotoneMap, check_full_domain, check_zero_in_image
from ..core.reports import HypothesisReport, SAMPLING_NOTE
from .problem import ProblemSpec, SolveReport, SolverConfig, Verdict

logger = logging.getLogger(__name__)

GREEN_RTOL = 1e-10
GROWTH_RTOL = 1e-6
SUPPORT_RTOL = 1e-8


def green_identity(traj: TrajectoryGrid, p: ExponentLike) -> Tuple[float, float, float]:
    """
    Termes de la sommation par parties discrète

    ⟨V_h x, x⟩ = Σ h‖d_{i+1/2}‖^p + (b, a) + (b_T, a_T), avec
    ⟨V_h x, x⟩ = −Σ_{i=1}^{n−1} h((φ(d_{i+1/2}) − φ(d_{i−1/2}))/h, x_i),
    b = φ(d_{1/2}), b_T = −φ(d_{n−1/2}).

    Returns:
        Tuple: (dissipation Σ h‖d‖^p, appariement ⟨V_h x, x⟩, terme de bord)
    """
    h = traj.grid.h
    x = traj.values
    d = traj.differences()
    flux = phi(p, d)
    p_val = p.p if hasattr(p, 'p') else float(p)
    dissipation = float(np.sum(h * np.linalg.norm(d, axis=1) ** p_val))
    pairing = float(-np.sum((flux[1:] - flux[:-1]) * x[1:-1]))
    boundary = float(flux[0] @ x[0] - flux[-1] @ x[-1])
    return dissipation, pairing, boundary


def verify_solution(spec: ProblemSpec, report: SolveReport, config: SolverConfig) -> Dict[str, Verdict]:
    """
    Recalcule et vérifie les certificats d'une solution

    Args:
        spec: Problème résolu
        report: Rapport de résolution
        config: Paramètres du solveur

    Returns:
        Dict[str, Verdict]: Un verdict par certificat
    """
    traj = report.trajectory
    grid = traj.grid
    x = traj.values
    norms = np.linalg.norm(x, axis=1)
    max_norm = float(np.max(norms))
    T = spec.T
    verdicts: Dict[str, Verdict] = {}

    verdicts['residual'] = Verdict('residual', report.residual_norm <= report.tolerance,
                                   report.residual_norm, report.tolerance)

    if spec.M is not None:
        bound = spec.M + config.hartman_slack * grid.h
        i = int(np.argmax(norms))
        verdicts['hartman'] = Verdict('hartman', max_norm <= bound, max_norm, bound,
                                      witness={'index': i, 't': grid.nodes[i], 'x': x[i]})
        condition = check_hartman(spec.F, spec.M, T=T, tol=config.tol_hartman)
        t_w, zeta_w, u_w = condition.witness
        verdicts['hartman_condition'] = Verdict(
            'hartman_condition', condition.passed, -condition.min_inner_product, config.tol_hartman,
            witness={'t': t_w, 'zeta': zeta_w, 'u': u_w}, note=SAMPLING_NOTE,
        )

    dissipation, pairing, boundary = green_identity(traj, spec.p)
    magnitude = max(1.0, abs(pairing), abs(dissipation) + abs(boundary))
    gap = abs(pairing - dissipation - boundary)
    verdicts['green_identity'] = Verdict('green_identity', gap <= GREEN_RTOL * magnitude, gap,
                                         GREEN_RTOL * magnitude)

    flux = report.flux
    b, b_T = flux[0], -flux[-1]
    bc_slack = 2.0 * (1.0 + np.linalg.norm(b) + np.linalg.norm(b_T)) * report.bc_residual_norm
    verdicts['green_inequality'] = Verdict(
        'green_inequality', dissipation - pairing <= GREEN_RTOL * magnitude + bc_slack,
        dissipation - pairing, GREEN_RTOL * magnitude + bc_slack,
        note='⟨V_h x, x⟩ ≥ Σ h‖d‖^p',
    )

    radius = spec.M if spec.M is not None else max_norm
    growth = float(np.max(np.linalg.norm(report.selection_trace, axis=1)))
    if radius > 0:
        growth = max(growth, estimate_growth(spec.F, radius, T=T))
    derivative_bound = (T * radius * growth * (1.0 + GROWTH_RTOL)
                        + T * radius * np.sqrt(spec.N) * report.residual_norm + bc_slack + 1e-12)
    verdicts['derivative_bound'] = Verdict(
        'derivative_bound', dissipation <= derivative_bound, dissipation, derivative_bound,
        note=f'R={radius:g}, sup a_R ≥ {growth:.6g}',
    )

    bc_bound = np.sqrt(2 * spec.N) * report.tolerance
    verdicts['bc_residual'] = Verdict('bc_residual', report.bc_residual_norm <= bc_bound,
                                      report.bc_residual_norm, bc_bound)

    u_max = float(np.max(np.linalg.norm(report.multiplier_trace, axis=1)))
    membership_bound = 2.0 * report.lam * u_max + 1e-12 * (1.0 + max_norm + u_max)
    if spec.A.kind == 'custom':
        membership_bound += 1e-9 * (1.0 + max_norm)
    measured = report.graph_membership_residual
    verdicts['graph_membership'] = Verdict(
        'graph_membership', measured <= membership_bound, measured, membership_bound,
        note=f'C = {measured / report.lam:.6g}',
    )

    if spec.xi.kind == 'product-normal-cone':
        K1, K2 = spec.xi.params['K1'], spec.xi.params['K2']
        a, a_T = x[0], x[-1]
        polar_tol = SUPPORT_RTOL + report.tolerance
        gap_left = abs(float(b @ a) - K1.support(b, polar_tol))
        gap_right = abs(float(b_T @ a_T) - K2.support(b_T, polar_tol))
        bound = 1e-8 * (1.0 + np.linalg.norm(b) * np.linalg.norm(a) + np.linalg.norm(b_T) * np.linalg.norm(a_T)) \
            + bc_slack
        verdicts['support_function'] = Verdict(
            'support_function', gap_left + gap_right <= bound, gap_left + gap_right, bound,
            note='(b, a) = σ(b, K₁), (b_T, a_T) = σ(b_T, K₂)',
        )

    failed = [name for name, v in verdicts.items() if not v.passed]
    if failed:
        logger.warning(f"Certificats en échec: {', '.join(failed)}")
    return verdicts


def check_hypotheses(A: MonotoneMap, F: MultiField, xi: BoundaryOperator, T: float,
                     M: Optional[float] = None, lambdas: Sequence[float] = (1.0, 1e-2, 1e-4, 1e-6),
                     seed: int = 0, graph_samples: int = 64) -> List[HypothesisReport]:
    """
    Exécute tous les vérificateurs d'hypothèses sans résoudre

    Args:
        A, F, xi: Composantes du problème
        T: Horizon
        M: Rayon de Hartman (optionnel)
        lambdas: Valeurs de λ pour H₀
        seed: Graine des échantillonnages
        graph_samples: Nombre de couples du graphe de ξ

    Returns:
        List[HypothesisReport]: Un rapport par hypothèse
    """
    full_domain = check_full_domain(A, seed=seed)
    if not A.full_domain:
        full_domain.extra['required'] = False
        full_domain.note = 'non requise dans le cadre convexe'
    reports = [check_zero_in_image(A), full_domain]

    if M is not None:
        reports.append(check_hartman(F, M, T=T, seed=seed).to_hypothesis())
    radius = M if M is not None else 1.0
    reports.append(HypothesisReport(
        name='H(F): croissance',
        passed=True,
        value=estimate_growth(F, radius, T=T, seed=seed),
        evidence='sampling',
        note=f'sup a_k estimé pour k = {radius:g}',
    ))
    reports.append(check_selection(F, T=T, radius=radius, seed=seed))
    reports.append(lower_semicontinuity_report(F))

    reports.append(check_zero_in_bc(xi))
    samples = sample_graph(xi, graph_samples, seed)
    reports.append(check_h_xi(xi, samples))
    h0 = check_h0(A, xi, lambdas, samples)
    if A.full_domain and F.convex_valued:
        h0.note = 'non requise dans le cadre D(A) = ℝᴺ'
        h0.extra['required'] = False
    reports.append(h0)
    logger.info(f"{sum(1 for r in reports if r.passed is False)} hypothèse(s) en échec sur {len(reports)}")
    return reports
