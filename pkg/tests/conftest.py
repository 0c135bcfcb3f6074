"""
Configuration pytest commune
Ajoute la racine du projet au chemin d'import et expose quelques fabriques de problèmes
"""

import os
import sys

import pytest

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from src.core.boundary import make_catalog_bc  # noqa: E402
from src.core.fields import constant_field, msin_field  # noqa: E402
from src.core.monotone import zero_map  # noqa: E402
from src.solver.problem import ProblemSpec  # noqa: E402


@pytest.fixture
def project_root() -> str:
    return ROOT


@pytest.fixture
def plugins_dir() -> str:
    return os.path.join(ROOT, 'plugins')


@pytest.fixture
def dirichlet_sin() -> ProblemSpec:
    """x″ = −π² sin(πt), x(0) = x(1) = 0 ; solution sin(πt)"""
    return ProblemSpec(N=1, p=2.0, T=1.0, A=zero_map(1), F=msin_field(1, 1.0),
                       xi=make_catalog_bc('dirichlet', dim=1), name='dirichlet-sin')


@pytest.fixture
def zero_problem() -> ProblemSpec:
    """A = 0, F = 0, Dirichlet, M = 1 ; unique solution nulle"""
    return ProblemSpec(N=2, p=3.0, T=1.0, A=zero_map(2), F=constant_field([0.0, 0.0]),
                       xi=make_catalog_bc('dirichlet', dim=2, p=3.0), M=1.0, name='zero')
