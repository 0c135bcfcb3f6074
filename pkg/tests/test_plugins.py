#!/usr/bin/env python3
"""
Test du gestionnaire de plug-ins
Découverte, résolution des fabriques 'module.attr' et résolution d'un problème non convexe
"""

import os
import sys

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import numpy as np
import pytest

from src.config.catalog import build_problem
from src.config.config_manager import ConfigurationManager
from src.core.exceptions import ValidationError
from src.core.fields import MultiField, check_hartman, check_selection
from src.plugins.plugin_manager import PluginManager
from src.solver.continuation import continuation_solve


def test_discovery(plugins_dir):
    manager = PluginManager(plugins_dir)
    names = [p['name'] for p in manager.list_plugins()]
    assert 'example_plugin' in names
    config = manager.get_plugin('example_plugin')['config']
    assert 'two_point_field' in config['factories']


def test_resolve_on_demand(plugins_dir):
    manager = PluginManager(plugins_dir, autoload=False)
    assert manager.list_plugins() == []
    factory = manager.resolve('example_plugin.two_point_field')
    field = factory(dim=2, T=1.0, p=2.0, c=0.5)
    assert isinstance(field, MultiField)
    assert not field.convex_valued
    assert np.allclose(field(0.0, [1.0, 1.0]), [1.5, 1.0])
    assert field.contains(0.0, [1.0, 1.0], [0.5, 1.0])
    assert check_selection(field, T=1.0).passed
    assert check_hartman(field, 1.0).passed


def test_resolve_errors(plugins_dir):
    manager = PluginManager(plugins_dir, autoload=False)
    with pytest.raises(ValidationError):
        manager.resolve('example_plugin')
    with pytest.raises(ValidationError):
        manager.resolve('missing_plugin.factory')
    with pytest.raises(ValidationError):
        manager.resolve('example_plugin.absent')
    with pytest.raises(ValidationError):
        manager.resolve('example_plugin.PLUGIN_CONFIG')


def test_cubic_map(plugins_dir):
    cubic = PluginManager(plugins_dir).build('example_plugin.cubic_map', dim=1, T=1.0, p=2.0, c=2.0)
    z = cubic.resolvent(0.1, np.array([1.0]))
    assert abs(z[0] + 0.2 * z[0] ** 3 - 1.0) <= 1e-10


def test_unload(plugins_dir):
    manager = PluginManager(plugins_dir)
    assert manager.unload_plugin('example_plugin')
    assert not manager.unload_plugin('example_plugin')


def test_missing_directory(tmp_path):
    manager = PluginManager(str(tmp_path / 'nowhere'))
    assert manager.list_plugins() == []
    assert manager.discover_and_load_plugins() == []


def test_nonconvex_problem_solves(plugins_dir, project_root):
    """Champ à deux points : variante non convexe, résolution par la sélection continue"""
    manager = PluginManager(plugins_dir, autoload=False)
    cfg = ConfigurationManager().import_configuration(os.path.join(project_root, 'configs', 'nonconvex_plugin.cfg'))
    spec, config = build_problem(cfg, manager)
    assert spec.variant == 'nonconvex'
    report = continuation_solve(spec, config)
    assert report.residual_norm <= report.tolerance
    assert report.verdicts['hartman'].passed
    assert report.verdicts['hartman_condition'].passed


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, '-v']))
