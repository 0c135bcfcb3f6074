#!/usr/bin/env python3
"""
Test des certificats a posteriori et de la vérification groupée des hypothèses
"""

import os
import sys
from dataclasses import replace

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import numpy as np
import pytest

from src.core.boundary import make_catalog_bc
from src.core.fields import affine_field, constant_field, linear_field, msin_field, negated_field
from src.core.grid import Grid, TrajectoryGrid
from src.core.monotone import identity_map, make_normal_cone, zero_map
from src.solver.certificates import check_hypotheses, verify_solution
from src.solver.continuation import continuation_solve
from src.solver.problem import ProblemSpec, SolverConfig


def test_zero_solution_passes_every_certificate(zero_problem):
    config = SolverConfig(n=16)
    report = continuation_solve(zero_problem, config)
    assert report.passed, {name: v.measured for name, v in report.verdicts.items() if not v.passed}
    assert set(report.verdicts) >= {'residual', 'hartman', 'hartman_condition', 'green_identity',
                                    'derivative_bound', 'bc_residual', 'graph_membership'}


def test_hartman_bound_on_manufactured_solution():
    """sin(πt) avec M = 2 : max ‖x‖ ≈ 1 ≤ 2"""
    spec = ProblemSpec(N=1, p=2.0, T=1.0, A=zero_map(1), F=msin_field(1, 1.0),
                       xi=make_catalog_bc('dirichlet', dim=1), M=2.0, name='msin-M2')
    report = continuation_solve(spec, SolverConfig(n=64))
    hartman = report.verdicts['hartman']
    assert hartman.passed
    assert hartman.measured == pytest.approx(1.0, abs=1e-3)


@pytest.mark.parametrize('kind', ['dirichlet', 'neumann', 'periodic'])
def test_hartman_bound_for_identity_field(kind):
    """F = {ζ}, M = 1 : max ‖x_i‖ ≤ 1 + 10h depuis un itéré aléatoire"""
    spec = ProblemSpec(N=2, p=2.0, T=1.0, A=zero_map(2), F=linear_field(2),
                       xi=make_catalog_bc(kind, dim=2), M=1.0, name=f'identity-{kind}')
    grid = Grid(1.0, 32)
    init = TrajectoryGrid(grid, 0.5 * np.random.default_rng(1).standard_normal((33, 2)))
    report = continuation_solve(spec, SolverConfig(n=32, lambda_schedule=(1.0,)), init=init)
    assert report.verdicts['hartman'].passed
    assert report.hartman_max_norm <= 1.0 + 10 * grid.h


def test_corrupted_node_breaks_hartman_bound():
    spec = ProblemSpec(N=1, p=2.0, T=1.0, A=zero_map(1), F=msin_field(1, 1.0),
                       xi=make_catalog_bc('dirichlet', dim=1), M=2.0, name='msin-M2')
    config = SolverConfig(n=32)
    report = continuation_solve(spec, config)
    values = np.array(report.trajectory.values)
    values[5] = 10.0 * spec.M
    corrupted = replace(report, trajectory=report.trajectory.with_values(values))
    verdicts = verify_solution(spec, corrupted, config)
    assert not verdicts['hartman'].passed
    assert verdicts['hartman'].witness['index'] == 5
    assert verdicts['green_identity'].passed


def test_violated_hartman_condition_is_reported():
    """F = {−ζ}, M = 1 : la solution nulle passe la borne mais pas la condition"""
    spec = ProblemSpec(N=1, p=2.0, T=1.0, A=zero_map(1), F=negated_field(1),
                       xi=make_catalog_bc('dirichlet', dim=1), M=1.0, name='negated')
    report = continuation_solve(spec, SolverConfig(n=16))
    assert report.verdicts['hartman'].passed
    assert not report.verdicts['hartman_condition'].passed
    assert not report.passed


def test_support_function_certificate():
    """Cônes normaux produits : (b, a) = σ(b, K₁) et (b_T, a_T) = σ(b_T, K₂)"""
    box = {'type': 'box', 'lower': [-0.5], 'upper': [0.5]}
    spec = ProblemSpec(N=1, p=2.0, T=1.0, A=zero_map(1), F=affine_field([1.0]),
                       xi=make_catalog_bc('product-normal-cone', {'K1': box, 'K2': box}, dim=1),
                       name='box-ends')
    report = continuation_solve(spec, SolverConfig(n=32))
    assert report.verdicts['support_function'].passed


@pytest.mark.parametrize('c', [-1.0, -2.0, -0.3, -3.7])
def test_support_function_on_orthant_ends(c):
    """K₁ = K₂ = ℝ₊ : solution intérieure x = −c, flux de bord au niveau de l'arrondi"""
    spec = ProblemSpec(N=1, p=2.0, T=1.0, A=zero_map(1), F=affine_field([c]),
                       xi=make_catalog_bc('product-normal-cone', {'K1': 'orthant', 'K2': 'orthant'}, dim=1),
                       name='orthant-ends')
    report = continuation_solve(spec, SolverConfig(n=32))
    assert np.allclose(report.trajectory.values[:, 0], -c, atol=1e-6)
    assert report.verdicts['support_function'].passed
    assert np.isfinite(report.verdicts['support_function'].measured)


def test_check_hypotheses_periodic_orthant():
    """Exemple périodique avec A = N_{ℝ₊²} : H₀ vaut exactement 0, D(A) ≠ ℝᴺ non requise"""
    reports = check_hypotheses(make_normal_cone('orthant', 2), constant_field([0.5, -0.25]),
                               make_catalog_bc('periodic', dim=2), 1.0)
    by_name = {r.name: r for r in reports}
    assert by_name['H₀'].value == 0.0 and by_name['H₀'].passed
    full = by_name['H(A): D(A) = ℝᴺ']
    assert full.passed is False and full.extra['required'] is False
    required_failures = [r for r in reports if r.passed is False and r.extra.get('required', True)]
    assert not required_failures


def test_check_hypotheses_reports_hartman_failure():
    reports = check_hypotheses(zero_map(1), negated_field(1), make_catalog_bc('dirichlet', dim=1), 1.0, M=1.0)
    hartman = [r for r in reports if 'Hartman' in r.name][0]
    assert hartman.passed is False
    assert hartman.witness is not None


def test_check_hypotheses_is_deterministic():
    args = (identity_map(2), constant_field([1.0, 0.0]), make_catalog_bc('neumann', dim=2), 1.0)
    first = [r.to_dict() for r in check_hypotheses(*args, M=2.0, seed=3)]
    second = [r.to_dict() for r in check_hypotheses(*args, M=2.0, seed=3)]
    assert first == second


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, '-v']))
