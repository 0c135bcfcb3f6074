"""
Module de configuration
Format des fichiers d'exécution, catalogue des exemples et import/export
"""

from .catalog import CATALOG, ProblemComponents, build_components, build_problem, list_catalog, parse_reference
from .config_manager import (
    BoundaryConfig, ConfigurationManager, FieldConfig, OutputsConfig, ProblemConfig, RunConfig,
    apply_overrides, parse_config, serialize,
)

__all__ = [
    'CATALOG', 'ProblemComponents', 'build_components', 'build_problem', 'list_catalog', 'parse_reference',
    'BoundaryConfig', 'ConfigurationManager', 'FieldConfig', 'OutputsConfig', 'ProblemConfig', 'RunConfig',
    'apply_overrides', 'parse_config', 'serialize',
]
