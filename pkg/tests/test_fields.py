#!/usr/bin/env python3
"""
Test des champs multivoques
Rétraction radiale, champ tronqué, condition de Hartman et estimation de croissance
"""

import os
import sys

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import numpy as np
import pytest

from src.core.exceptions import ValidationError
from src.core.fields import (
    MultiField, check_hartman, check_selection, constant_field, estimate_growth, make_builtin_field,
    negated_field, radial_retraction, sphere_points, tabulated_field, truncated_select,
)


def test_radial_retraction():
    assert np.allclose(radial_retraction(1.0, [3.0, 4.0]), [0.6, 0.8])
    assert np.array_equal(radial_retraction(5.0, [3.0, 4.0]), [3.0, 4.0])
    rng = np.random.default_rng(0)
    z = 4.0 * rng.standard_normal((300, 3))
    once = radial_retraction(2.0, z)
    assert np.all(np.linalg.norm(once, axis=1) <= 2.0 + 1e-12)
    assert np.allclose(radial_retraction(2.0, once), once, rtol=0, atol=1e-15)
    with pytest.raises(ValidationError):
        radial_retraction(0.0, [1.0])


def test_truncated_select():
    """−select(t, p_M ζ) + φ(p_M ζ)"""
    zero = constant_field([0.0, 0.0])
    assert np.allclose(truncated_select(zero, 2.0, 1.0, 0.0, [3.0, 4.0]), [0.6, 0.8])
    shift = constant_field([1.0, 0.0])
    assert np.allclose(truncated_select(shift, 3.0, 1.0, 0.0, [0.0, 2.0]), [-1.0, 1.0])


def test_hartman_examples():
    """F = {ζ} passe pour tout M ; F = {(−1, 0)} échoue à M = 2 avec le témoin (2, 0)"""
    identity = MultiField(dim=2, select=lambda t, z: z, name='identity')
    for M in (0.5, 1.0, 3.0):
        report = check_hartman(identity, M)
        assert report.passed
        assert report.min_inner_product == pytest.approx(M * M)

    report = check_hartman(constant_field([-1.0, 0.0]), 2.0)
    assert not report.passed
    assert report.min_inner_product == pytest.approx(-2.0)
    t, zeta, u = report.witness
    assert np.allclose(zeta, [2.0, 0.0])
    assert report.to_hypothesis().passed is False

    assert not check_hartman(negated_field(1), 1.0).passed


def test_sphere_points():
    for dim in (1, 2, 3, 5):
        points = sphere_points(dim, 32, radius=2.0)
        assert np.allclose(np.linalg.norm(points, axis=1), 2.0)
        assert points.shape[1] == dim


def test_estimate_growth():
    """F = {ζ}, k = 3 donne 3 ; F = {(sin t, 0)} sur [0, π] donne ≈ 1"""
    identity = MultiField(dim=2, select=lambda t, z: z)
    assert estimate_growth(identity, 3.0) == pytest.approx(3.0, abs=1e-12)
    wave = MultiField(dim=2, select=lambda t, z: np.array([np.sin(t), 0.0]))
    assert abs(estimate_growth(wave, 1.0, T=np.pi) - 1.0) <= 1e-3


def test_builtin_fields():
    msin = make_builtin_field('msin', 2, 1.0, 2.0)
    assert np.allclose(msin(0.5, [0.0, 0.0]), [-np.pi ** 2, 0.0])
    long = make_builtin_field('msin', 1, 2.0, 2.0)
    assert long(1.0, [0.0])[0] == pytest.approx(-np.pi ** 2 / 4.0)
    assert long(0.0, [0.0])[0] == 0.0
    plap3 = make_builtin_field('plap3', 1, 1.0, 3.0)
    assert plap3(0.0, [0.0])[0] == pytest.approx(-4.0)
    step = make_builtin_field('step', 1, 1.0, 2.0, {'g1': [1.0], 'g2': [-1.0], 't_star': 0.5})
    assert step(0.5, [0.0])[0] == 1.0 and step(0.51, [0.0])[0] == -1.0
    affine = make_builtin_field('affine', 2, 1.0, 2.0, {'c': 0.5})
    assert np.allclose(affine(0.0, [1.0, 1.0]), [1.5, 1.5])
    with pytest.raises(ValidationError):
        make_builtin_field('step', 1, 1.0, 2.0, {'g1': [1.0]})
    with pytest.raises(ValidationError):
        make_builtin_field('constant', 2, 1.0, 2.0, {'c': [1.0, 2.0, 3.0]})
    with pytest.raises(ValidationError):
        make_builtin_field('nope', 1, 1.0, 2.0)


def test_tabulated_field():
    field = tabulated_field([[0.0, 0.0, 2.0], [1.0, 1.0, 0.0]])
    assert np.allclose(field(0.25, [0.0, 0.0]), [0.25, 1.5])
    with pytest.raises(ValidationError):
        tabulated_field([[0.0, 1.0], [0.0, 2.0]])


def test_selection_membership():
    assert check_selection(constant_field([1.0])).passed
    broken = MultiField(dim=1, select=lambda t, z: z, member=lambda t, z, u, tol: False, convex_valued=False)
    report = check_selection(broken)
    assert report.passed is False and report.witness is not None


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, '-v']))
