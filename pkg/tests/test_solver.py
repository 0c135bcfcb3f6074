#!/usr/bin/env python3
"""
Test du solveur
Newton régularisé, continuation λ ↘ 0, conditions aux limites du catalogue et oracle d'obstacle
"""

import os
import sys

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import numpy as np
import pytest

from src.config.catalog import OBSTACLE_SCHEDULE
from src.core.boundary import make_catalog_bc
from src.core.exceptions import InvalidProblem, NonConvergence, ValidationError
from src.core.fields import constant_field, make_builtin_field, msin_field, step_field
from src.core.grid import Grid, TrajectoryGrid
from src.core.monotone import identity_map, make_normal_cone, zero_map
from src.solver.continuation import continuation_solve, secant_predictor
from src.solver.discretization import evaluate_residual
from src.solver.newton import ROUNDOFF_FACTOR, solve_regularized, stopping_tolerance
from src.solver.obstacle import obstacle_reference, projected_sor
from src.solver.problem import ProblemSpec, SolverConfig


def print_section(title: str):
    print(f"\n📋 {title}")
    print("-" * 40)


def test_manufactured_dirichlet(dirichlet_sin):
    """p = 2, x = sin(πt) : erreur nodale ≤ 1e-3 pour n = 64"""
    report = continuation_solve(dirichlet_sin, SolverConfig(n=64))
    exact = np.sin(np.pi * report.trajectory.times)
    error = np.max(np.abs(report.trajectory.values[:, 0] - exact))
    print_section("Dirichlet manufacturé")
    print(f"✅ erreur max = {error:.3e}, λ final = {report.lam:g}")
    assert error <= 1e-3
    assert report.residual_norm <= report.tolerance
    assert report.passed


def test_manufactured_dirichlet_on_longer_interval():
    """T = 2 : x = sin(πt/2) résout le problème msin"""
    spec = ProblemSpec(N=1, p=2.0, T=2.0, A=zero_map(1), F=msin_field(1, 2.0),
                       xi=make_catalog_bc('dirichlet', dim=1), name='dirichlet-sin-T2')
    report = continuation_solve(spec, SolverConfig(n=64, lambda_schedule=(1.0,)))
    exact = np.sin(np.pi * report.trajectory.times / 2.0)
    assert np.max(np.abs(report.trajectory.values[:, 0] - exact)) <= 1e-3


def test_zero_problem_from_random_start():
    """A = 0, F = 0 : la trajectoire converge vers 0 depuis un itéré aléatoire"""
    spec = ProblemSpec(N=2, p=2.0, T=1.0, A=zero_map(2), F=constant_field([0.0, 0.0]),
                       xi=make_catalog_bc('dirichlet', dim=2), M=1.0, name='zero')
    grid = Grid(1.0, 16)
    init = TrajectoryGrid(grid, 0.1 * np.random.default_rng(0).standard_normal((17, 2)))
    report = continuation_solve(spec, SolverConfig(n=16, lambda_schedule=(1.0, 1e-2)), init=init)
    assert np.max(np.abs(report.trajectory.values)) <= 1e-8


def test_zero_operator_history_is_flat(dirichlet_sin):
    """A = 0 : la solution ne dépend pas de λ, les écarts entre étapes sont nuls"""
    report = continuation_solve(dirichlet_sin, SolverConfig(n=32))
    assert len(report.continuation_history) == 7
    assert all(step.step_diff == 0.0 for step in report.continuation_history)
    assert all(step.iterations == 0 for step in report.continuation_history[1:])


def test_periodic_constant_solution():
    """A = I, F = {c}, périodique : x = −c(1 + λ) → −c"""
    c = np.array([0.5, -0.25])
    spec = ProblemSpec(N=2, p=2.0, T=1.0, A=identity_map(2), F=constant_field(c),
                       xi=make_catalog_bc('periodic', dim=2), name='periodic')
    report = continuation_solve(spec, SolverConfig(n=32, newton_tol=1e-12))
    assert np.max(np.abs(report.trajectory.values + c)) <= 1e-5
    assert report.residual_norm <= report.tolerance


def test_stopping_tolerance_has_roundoff_floor(dirichlet_sin):
    """Le seuil ne descend pas sous c·eps·max(1, ‖x‖_∞)/h², même pour newton_tol minuscule"""
    grid = Grid(1.0, 32)
    floor = ROUNDOFF_FACTOR * np.finfo(float).eps * grid.n ** 2
    values = np.zeros((33, 1))
    parts = evaluate_residual(dirichlet_sin, 1.0, values, grid, 1.0)
    assert stopping_tolerance(values, parts, grid, 1e-300) == pytest.approx(floor)
    scaled = np.full((33, 1), 1e3)
    parts = evaluate_residual(dirichlet_sin, 1.0, scaled, grid, 1.0)
    assert stopping_tolerance(scaled, parts, grid, 1e-300) == pytest.approx(1e3 * floor)
    assert stopping_tolerance(values, parts, grid, 1e-10) > 1e-10


def test_periodic_conditions_hold():
    spec = ProblemSpec(N=1, p=2.0, T=1.0, A=identity_map(1), F=msin_field(1, 1.0),
                       xi=make_catalog_bc('periodic', dim=1), name='periodic-sin')
    report = continuation_solve(spec, SolverConfig(n=64, newton_tol=1e-12))
    values, flux = report.trajectory.values, report.flux
    assert np.linalg.norm(values[0] - values[-1]) <= 1e-8
    assert np.linalg.norm(flux[0] - flux[-1]) <= 1e-6
    assert report.verdicts['green_inequality'].passed
    assert report.verdicts['green_identity'].passed


def test_sturm_liouville_conditions_hold():
    """θ = η = 1 : x(0) = d_{1/2}, x(T) = −d_{n−1/2}"""
    spec = ProblemSpec(N=1, p=2.0, T=1.0, A=zero_map(1), F=constant_field([1.0]),
                       xi=make_catalog_bc('sturm-liouville', {'theta': 1.0, 'eta': 1.0}, dim=1),
                       name='sturm-liouville')
    report = continuation_solve(spec, SolverConfig(n=64, newton_tol=1e-12))
    d = report.trajectory.differences()
    x = report.trajectory.values
    assert abs(x[0, 0] - d[0, 0]) <= 1e-6
    assert abs(x[-1, 0] + d[-1, 0]) <= 1e-6
    assert report.verdicts['green_inequality'].passed
    assert report.verdicts['green_inequality'].measured <= 0.0


def test_p3_manufactured_converges():
    spec = ProblemSpec(N=1, p=3.0, T=1.0, A=zero_map(1), F=make_builtin_field('plap3', 1, 1.0, 3.0),
                       xi=make_catalog_bc('dirichlet', dim=1, p=3.0), name='plap3')
    report = continuation_solve(spec, SolverConfig(n=128, lambda_schedule=(1.0,)))
    exact = report.trajectory.times * (1.0 - report.trajectory.times)
    assert np.max(np.abs(report.trajectory.values[:, 0] - exact)) <= 1e-2


def obstacle_problem() -> ProblemSpec:
    point = {'type': 'singleton', 'point': [0.0]}
    return ProblemSpec(N=1, p=2.0, T=1.0, A=make_normal_cone('orthant', 1),
                       F=step_field([1.0], [-1.0], 0.5),
                       xi=make_catalog_bc('product-normal-cone', {'K1': point, 'K2': point}, dim=1),
                       name='obstacle')


def test_obstacle_matches_psor():
    """Pénalisation λ → 1e-12 contre l'oracle PSOR du LCP discret"""
    spec = obstacle_problem()
    report = continuation_solve(spec, SolverConfig(n=64, lambda_schedule=OBSTACLE_SCHEDULE))
    reference = obstacle_reference(spec, 64)
    gap = np.max(np.abs(report.trajectory.values - reference))
    print_section("Obstacle")
    print(f"✅ écart à PSOR = {gap:.3e}")
    assert gap <= 1e-6
    assert np.min(report.trajectory.values) >= -1e-10
    # multiplicateur de l'inégalité u = −A_λ(x)
    assert np.min(-report.multiplier_trace) >= -1e-10

    comp = [step.complementarity for step in report.continuation_history]
    assert all(b <= a + 1e-12 for a, b in zip(comp, comp[1:]))
    assert comp[-1] <= 1e-4


def test_obstacle_iteration_counts_non_increasing():
    """Démarrages à chaud : itérations de Newton non croissantes après les deux premiers λ"""
    report = continuation_solve(obstacle_problem(), SolverConfig(n=64, lambda_schedule=OBSTACLE_SCHEDULE))
    counts = [step.iterations for step in report.continuation_history]
    print_section("Itérations par λ")
    print(f"✅ {counts}")
    assert len(counts) == len(OBSTACLE_SCHEDULE)
    assert all(b <= a for a, b in zip(counts[2:], counts[3:])), counts


def test_secant_predictor_is_exact_for_affine_dependence():
    """A = I, F = {c} : x_λ = −c(1 + λ) est affine en λ, le prédicteur la reproduit"""
    c = np.array([0.5, -0.25])
    spec = ProblemSpec(N=2, p=2.0, T=1.0, A=identity_map(2), F=constant_field(c),
                       xi=make_catalog_bc('periodic', dim=2), name='periodic')
    grid = Grid(1.0, 16)
    config = SolverConfig(n=16)
    current = TrajectoryGrid(grid, np.tile(-c * (1.0 + 1e-1), (17, 1)))
    older = np.tile(-c * 2.0, (17, 1))
    predicted = secant_predictor(spec, 1e-2, config, current, older, 1e-1, 1.0)
    assert np.allclose(predicted.values, -c * (1.0 + 1e-2), atol=1e-14)

    # pas de gain : le démarrage à chaud est conservé
    kept = secant_predictor(spec, 1e-2, config, current, current.values, 1e-1, 1.0)
    assert kept is current


def test_projected_sor_small_lcp():
    """K = I, q = (−1, 2) : x = (1, 0)"""
    x, sweeps = projected_sor(np.eye(2), np.array([-1.0, 2.0]), omega=1.0)
    assert np.allclose(x, [1.0, 0.0]) and sweeps >= 1
    with pytest.raises(ValidationError):
        projected_sor(np.eye(2), np.zeros(2), omega=2.5)


def test_obstacle_reference_requires_scalar_problem(dirichlet_sin):
    with pytest.raises(ValidationError):
        obstacle_reference(dirichlet_sin, 16)


def test_nonconvergence_reports_best_iterate():
    """p = 3 depuis 0 : une seule itération ne suffit pas"""
    spec = ProblemSpec(N=1, p=3.0, T=1.0, A=zero_map(1), F=make_builtin_field('plap3', 1, 1.0, 3.0),
                       xi=make_catalog_bc('dirichlet', dim=1, p=3.0), name='plap3')
    config = SolverConfig(n=16, newton_max_iters=1, picard_fallback_iters=0, newton_tol=1e-300,
                          lambda_schedule=(1.0,))
    with pytest.raises(NonConvergence) as info:
        continuation_solve(spec, config)
    assert info.value.lam == 1.0
    assert info.value.best_iterate is not None
    assert info.value.residual_history


def test_invalid_problems():
    with pytest.raises(InvalidProblem):
        ProblemSpec(N=1, p=2.0, T=1.0, A=make_normal_cone({'type': 'singleton', 'point': [1.0]}),
                    F=constant_field([0.0]), xi=make_catalog_bc('dirichlet', dim=1))
    with pytest.raises(InvalidProblem):
        ProblemSpec(N=2, p=2.0, T=1.0, A=zero_map(2), F=constant_field([0.0]),
                    xi=make_catalog_bc('dirichlet', dim=2))
    with pytest.raises(ValidationError):
        ProblemSpec(N=1, p=1.5, T=1.0, A=zero_map(1), F=constant_field([0.0]),
                    xi=make_catalog_bc('dirichlet', dim=1))


def test_solver_config_validation():
    with pytest.raises(ValidationError):
        SolverConfig(lambda_schedule=())
    with pytest.raises(ValidationError):
        SolverConfig(lambda_schedule=(1e-2, 1.0))
    with pytest.raises(ValidationError):
        SolverConfig(n=1)
    config = SolverConfig(n=32)
    assert config.epsilon_for(0, 0.5) == pytest.approx(0.5)
    assert config.with_grid(64).n == 64


def test_solve_regularized_rejects_foreign_grid(dirichlet_sin):
    init = TrajectoryGrid.zeros(Grid(2.0, 8), 1)
    with pytest.raises(ValidationError):
        solve_regularized(dirichlet_sin, 1.0, 1e-3, init, SolverConfig(n=8))
    with pytest.raises(ValidationError):
        solve_regularized(dirichlet_sin, 1.0, 1e-3, TrajectoryGrid.zeros(Grid(1.0, 8), 1), SolverConfig(n=16))
    with pytest.raises(ValidationError):
        continuation_solve(dirichlet_sin, SolverConfig(n=16), init=TrajectoryGrid.zeros(Grid(1.0, 32), 1))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, '-v']))
