#!/usr/bin/env python3
"""
Test de la discrétisation conservative
Résidu, identité de Green discrète et structure de la jacobienne
"""

import os
import sys
from dataclasses import replace

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import numpy as np
import pytest

from src.core.boundary import make_catalog_bc
from src.core.exceptions import ValidationError
from src.core.fields import linear_field, make_builtin_field
from src.core.grid import Grid, TrajectoryGrid
from src.core.monotone import make_normal_cone, zero_map
from src.solver.certificates import green_identity
from src.solver.discretization import assemble_jacobian, assemble_residual, evaluate_residual
from src.solver.problem import ProblemSpec, SolverConfig


def manufactured(p: float) -> ProblemSpec:
    field = 'msin' if p == 2.0 else 'plap3'
    return ProblemSpec(N=1, p=p, T=1.0, A=zero_map(1), F=make_builtin_field(field, 1, 1.0, p),
                       xi=make_catalog_bc('dirichlet', dim=1, p=p), name=field)


def exact(p: float, grid: Grid) -> TrajectoryGrid:
    if p == 2.0:
        return TrajectoryGrid.from_function(grid, lambda t: [np.sin(np.pi * t)])
    return TrajectoryGrid.from_function(grid, lambda t: [t * (1.0 - t)])


def test_zero_trajectory_has_zero_residual(zero_problem):
    traj = TrajectoryGrid.zeros(Grid(1.0, 16), 2)
    residual = assemble_residual(zero_problem, 1e-3, 1e-3, traj, SolverConfig(n=16))
    assert residual.shape == (2 * 17,)
    assert np.array_equal(residual, np.zeros(34))


def test_manufactured_residual_is_small():
    """Solution exacte injectée dans le schéma : résidu intérieur ≤ 1e-2 pour n = 64"""
    grid = Grid(1.0, 64)
    residual = assemble_residual(manufactured(2.0), 1e-6, 1e-3, exact(2.0, grid), SolverConfig(n=64))
    assert np.max(np.abs(residual)) <= 1e-2


def test_p3_consistency_improves_with_refinement():
    errors = []
    for n in (16, 32, 64):
        grid = Grid(1.0, n)
        residual = assemble_residual(manufactured(3.0), 1e-6, 1e-3, exact(3.0, grid), SolverConfig(n=n))
        errors.append(np.max(np.abs(residual)))
    assert errors[-1] <= errors[0]


def test_residual_rows_are_bc_residuals():
    spec = manufactured(2.0)
    grid = Grid(1.0, 8)
    values = np.linspace(0.5, -0.25, 9)[:, None]
    parts = evaluate_residual(spec, 1e-2, values, grid, 1.0)
    assert parts.residual[0, 0] == pytest.approx(0.5)
    assert parts.residual[-1, 0] == pytest.approx(-0.25)
    assert parts.flux.shape == (8, 1)


def test_green_identity():
    """Σ h‖d‖^p + (b, a) + (b_T, a_T) = ⟨V_h x, x⟩ sur des trajectoires aléatoires"""
    rng = np.random.default_rng(7)
    for p in (2.0, 3.0, 4.0):
        for n in (8, 64):
            traj = TrajectoryGrid(Grid(1.0, n), rng.standard_normal((n + 1, 2)))
            dissipation, pairing, boundary = green_identity(traj, p)
            assert abs(pairing - dissipation - boundary) <= 1e-12 * max(1.0, dissipation), f"p={p} n={n}"


def test_jacobian_matches_dense_difference():
    """Jacobienne colorée contre différences finies colonne par colonne (p = 2)"""
    spec = ProblemSpec(N=1, p=2.0, T=1.0, A=make_normal_cone('orthant', 1),
                       F=make_builtin_field('linear', 1, 1.0, 2.0, {'scale': 0.5}),
                       xi=make_catalog_bc('periodic', dim=1), name='jac')
    n = 10
    grid = Grid(1.0, n)
    values = (0.3 + np.sin(np.arange(n + 1)))[:, None]
    jac = assemble_jacobian(spec, 0.1, 1e-3, values, grid, 1.0).toarray()
    base = evaluate_residual(spec, 0.1, values, grid, 1.0).residual.reshape(-1)
    dense = np.zeros_like(jac)
    for j in range(n + 1):
        step = 1e-7
        shifted = values.copy()
        shifted[j, 0] += step
        dense[:, j] = (evaluate_residual(spec, 0.1, shifted, grid, 1.0).residual.reshape(-1) - base) / step
    assert np.max(np.abs(jac - dense)) <= 1e-4 * max(1.0, np.max(np.abs(dense)))


def test_truncation_is_inactive_inside_ball():
    """max‖x_i‖ ≤ M : le résidu tronqué coïncide avec le résidu sans troncature"""
    rng = np.random.default_rng(9)
    grid = Grid(1.0, 32)
    for p in (2.0, 3.0):
        truncated = ProblemSpec(N=2, p=p, T=1.0, A=make_normal_cone('orthant', 2), F=linear_field(2, 0.5),
                                xi=make_catalog_bc('neumann', dim=2, p=p), M=2.0, name='truncated')
        plain = replace(truncated, M=None)
        values = rng.uniform(-1.0, 1.0, size=(33, 2))
        values *= 1.9 / np.max(np.linalg.norm(values, axis=1))
        for lam in (1.0, 1e-4):
            inside = evaluate_residual(truncated, lam, values, grid, 1.0).residual
            reference = evaluate_residual(plain, lam, values, grid, 1.0).residual
            assert np.allclose(inside, reference, rtol=0.0, atol=1e-12), f"p={p} λ={lam}"

        values[10] = [3.0, 0.0]
        inside = evaluate_residual(truncated, 1.0, values, grid, 1.0).residual
        reference = evaluate_residual(plain, 1.0, values, grid, 1.0).residual
        assert not np.allclose(inside[10], reference[10])
        assert np.allclose(np.delete(inside, 10, axis=0), np.delete(reference, 10, axis=0), rtol=0.0, atol=1e-12)


def test_invalid_arguments():
    spec = manufactured(2.0)
    traj = TrajectoryGrid.zeros(Grid(1.0, 8), 2)
    with pytest.raises(ValidationError):
        assemble_residual(spec, 1e-3, 1e-3, traj, SolverConfig(n=8))
    with pytest.raises(ValidationError):
        assemble_residual(spec, 0.0, 1e-3, TrajectoryGrid.zeros(Grid(1.0, 8), 1), SolverConfig(n=8))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, '-v']))
