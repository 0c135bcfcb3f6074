#!/usr/bin/env python3
"""
Test du gestionnaire de configuration
Format texte à sections, validation, surcharges, catalogue et import/export
"""

import os
import sys

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import pytest

from src.config.catalog import CATALOG, build_problem, list_catalog, parse_reference, validate_catalog_params
from src.config.config_manager import (
    BoundaryConfig, ConfigurationManager, FieldConfig, OutputsConfig, ProblemConfig, RunConfig, parse_config, serialize,
)
from src.core.exceptions import ParseError, ValidationError

CONFIGS_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), '..', 'configs')

MINIMAL = """\
[problem]
N = 1
p = 2
T = 1
A = zero

[field]
name = builtin:msin

[boundary]
kind = dirichlet
"""


def test_run_config_defaults():
    """Valeurs par défaut de chaque section, attribut public cfg.field conservé"""
    cfg = RunConfig()
    assert cfg.problem == ProblemConfig()
    assert cfg.field == FieldConfig()
    assert cfg.boundary == BoundaryConfig()
    assert cfg.solver == {}
    assert cfg.outputs == OutputsConfig()
    assert cfg.label == 'inline' and not cfg.is_catalog


def test_minimal_config():
    cfg = parse_config(MINIMAL)
    assert not cfg.is_catalog
    assert cfg.problem.N == 1 and cfg.problem.p == 2.0
    assert cfg.field.name == 'builtin:msin'
    assert cfg.outputs.solution == 'solution.csv'
    spec, config = build_problem(cfg)
    assert spec.variant == 'full-domain'
    assert config.n == 64


def test_p_below_two_is_rejected_with_line():
    with pytest.raises(ValidationError) as info:
        parse_config(MINIMAL.replace('p = 2', 'p = 1.5'))
    assert 'p must be ≥ 2' in str(info.value)
    assert info.value.key == 'problem.p'
    assert info.value.line == 3


def test_catalog_and_inline_are_exclusive():
    text = "[problem]\ncatalog = example3\n\n[boundary]\nkind = neumann\n"
    with pytest.raises(ValidationError) as info:
        parse_config(text)
    assert info.value.key == 'problem.catalog'


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ParseError) as info:
        parse_config("[problem]\nN = 1\nthis line has no equals\n")
    assert info.value.line == 3
    with pytest.raises(ParseError) as info:
        parse_config("N = 1\n")
    assert info.value.line == 1


def test_unknown_keys_and_sections():
    with pytest.raises(ValidationError) as info:
        parse_config(MINIMAL + "\n[extras]\nfoo = 1\n")
    assert info.value.line == 13
    with pytest.raises(ValidationError) as info:
        parse_config(MINIMAL.replace('A = zero', 'B = zero'))
    assert info.value.key == 'problem.B'


def test_semantic_errors_carry_key_and_line():
    text = MINIMAL.replace('kind = dirichlet', 'kind = sturm-liouville\nparams = {theta: 0.0}')
    with pytest.raises(ValidationError) as info:
        parse_config(text)
    assert info.value.key == 'boundary.theta'
    assert info.value.line == 12

    with pytest.raises(ValidationError) as info:
        parse_config(MINIMAL + "\n[solver]\nlambda_schedule = []\n")
    assert info.value.key == 'solver.lambda_schedule'


def test_missing_inline_keys():
    with pytest.raises(ValidationError) as info:
        parse_config(MINIMAL.replace('T = 1\n', ''))
    assert info.value.key == 'problem.T'


def test_overrides():
    cfg = parse_config(MINIMAL, overrides=['solver.n=128', 'solver.lambda_schedule=[1, 1e-1]'])
    assert cfg.solver['n'] == 128
    assert cfg.solver['lambda_schedule'] == [1.0, 0.1]
    cfg = parse_config("[problem]\ncatalog = example6\n", overrides=['problem.catalog_params.theta=2.0'])
    assert cfg.problem.catalog_params == {'theta': 2.0}
    with pytest.raises(ValidationError):
        parse_config(MINIMAL, overrides=['solver.unknown=1'])
    with pytest.raises(ParseError):
        parse_config(MINIMAL, overrides=['solver.n'])


@pytest.mark.parametrize('name', sorted(CATALOG))
def test_catalog_configs_round_trip(name):
    """parse(serialize(cfg)) == cfg pour chaque fichier du catalogue"""
    with open(os.path.join(CONFIGS_DIR, f'{name}.cfg'), encoding='utf-8') as f:
        cfg = parse_config(f.read())
    assert parse_config(serialize(cfg)) == cfg
    assert cfg.problem.catalog == name


def test_inline_config_round_trip():
    cfg = parse_config(MINIMAL + "\n[solver]\nn = 32\nnewton_tol = 1e-12\n\n[outputs]\nstudy_grids = [8, 16]\n")
    text = serialize(cfg)
    assert parse_config(text) == cfg
    assert cfg.outputs.study_grids == (8, 16)
    assert cfg.solver['newton_tol'] == 1e-12


def test_catalog_params_validation():
    validate_catalog_params('example5', {'A': 'orthant-cone'})
    with pytest.raises(ValidationError):
        validate_catalog_params('example5', {'A': 'box'})
    with pytest.raises(ValidationError):
        validate_catalog_params('example6', {'theta': -1.0})
    with pytest.raises(ValidationError):
        validate_catalog_params('example6', {'kappa': 1.0})
    with pytest.raises(ValidationError):
        validate_catalog_params('example9', {})
    assert 'builder' not in list_catalog()['example1']


def test_catalog_problems_build():
    for name in CATALOG:
        spec, config = build_problem(parse_config(f"[problem]\ncatalog = {name}\n"))
        assert spec.name == name
    spec, config = build_problem(parse_config("[problem]\ncatalog = example2\n"))
    assert config.lambda_schedule[-1] == pytest.approx(1e-12)
    spec, _ = build_problem(parse_config("[problem]\ncatalog = example1\n"))
    assert spec.N == 2 and spec.M is not None


def test_parse_reference():
    assert parse_reference('builtin:msin') == ('builtin', 'msin')
    assert parse_reference('plugin:mod.attr') == ('plugin', 'mod.attr')
    assert parse_reference('msin') == ('builtin', 'msin')
    with pytest.raises(ValidationError):
        parse_reference('other:msin')


@pytest.mark.parametrize('fmt', ['cfg', 'json', 'yaml'])
def test_export_import(tmp_path, fmt):
    manager = ConfigurationManager(str(tmp_path))
    cfg = parse_config("[problem]\ncatalog = example1\ncatalog_params = {c: [1.0, -0.5]}\n\n[solver]\nn = 32\n")
    path = manager.export_configuration(cfg, format=fmt, filename=f'example1.{fmt}')
    assert manager.import_configuration(path) == cfg
    listed = manager.list_configurations()
    assert len(listed) == 1 and listed[0]['catalog'] == 'example1'


def test_import_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        ConfigurationManager(str(tmp_path)).import_configuration(str(tmp_path / 'absent.cfg'))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, '-v']))
