"""
Catalogue des problèmes types et assemblage des composantes
Exemples 1 à 6 avec leurs schémas de paramètres, champs intégrés et références plug-in
"""

import logging
import os
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Tuple, TYPE_CHECKING

import numpy as np

from ..core.boundary import BoundaryOperator, make_catalog_bc
from ..core.exceptions import ValidationError
from ..core.fields import MultiField, affine_field, constant_field, make_builtin_field, msin_field, step_field
from ..core.monotone import MonotoneMap, make_monotone_map, make_normal_cone, zero_map

if TYPE_CHECKING:
    from ..plugins.plugin_manager import PluginManager
    from ..solver.problem import ProblemSpec, SolverConfig
    from .config_manager import RunConfig

logger = logging.getLogger(__name__)

OBSTACLE_SCHEDULE = tuple(10.0 ** -k for k in range(13))

_NUMBER = {'type': 'number'}
_VECTOR = {'type': 'array', 'items': {'type': 'number'}}
_SET = {'type': 'object', 'description': "Descripteur d'ensemble convexe (type: box, ball, singleton, orthant...)"}


@dataclass
class ProblemComponents:
    """Composantes résolues d'une configuration, avant construction du ProblemSpec"""
    N: int
    p: float
    T: float
    M: Optional[float]
    A: MonotoneMap
    F: MultiField
    xi: BoundaryOperator
    name: str = ''
    solver_defaults: Dict[str, Any] = field(default_factory=dict)
    reference: Optional[str] = None


def _coordinates(dim: int, values, key: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(values, dtype=float))
    if arr.size == 1 and dim > 1:
        arr = np.full(dim, arr[0])
    if arr.shape != (dim,):
        raise ValidationError(f"'{key}' doit avoir {dim} composante(s), reçu {arr.tolist()}",
                              key=f'problem.catalog_params.{key}')
    return arr


def _default_c(dim: int) -> np.ndarray:
    return np.array([1.0] + [-0.5] * (dim - 1))


def _example1(params: Dict[str, Any], N: int, p: float, T: float):
    K1 = params.get('K1', {'type': 'box', 'lower': [-0.5] * N, 'upper': [0.5] * N})
    K2 = params.get('K2', {'type': 'ball', 'center': [0.0] * N, 'radius': 0.25})
    c = _coordinates(N, params.get('c', _default_c(N)), 'c')
    xi = make_catalog_bc('product-normal-cone', {'K1': K1, 'K2': K2}, N, p)
    return zero_map(N), affine_field(c), xi, float(np.linalg.norm(c)) + 0.5


def _example2(params: Dict[str, Any], N: int, p: float, T: float):
    scale = float(params.get('scale', 1.0))
    t_star = float(params.get('t_star', 0.5 * T))
    if not 0 < t_star < T:
        raise ValidationError(f"t_star doit être dans ]0, T[, reçu {t_star}", key='problem.catalog_params.t_star')
    point = {'type': 'singleton', 'point': [0.0] * N}
    xi = make_catalog_bc('product-normal-cone', {'K1': point, 'K2': point}, N, p)
    F = step_field(np.full(N, scale), np.full(N, -scale), t_star)
    return make_normal_cone('orthant', N), F, xi, None


def _example3(params: Dict[str, Any], N: int, p: float, T: float):
    return zero_map(N), msin_field(N, T), make_catalog_bc('dirichlet', dim=N, p=p), None


def _example4(params: Dict[str, Any], N: int, p: float, T: float):
    c = _coordinates(N, params.get('c', [0.5]), 'c')
    return zero_map(N), affine_field(c), make_catalog_bc('neumann', dim=N, p=p), float(np.linalg.norm(c)) + 0.5


def _example5(params: Dict[str, Any], N: int, p: float, T: float):
    c = _coordinates(N, params.get('c', [0.5, -0.25][:N] if N <= 2 else [0.5] * N), 'c')
    A = make_monotone_map(params.get('A', 'identity'), {'c': params.get('a_scale', 1.0)}, N)
    return A, constant_field(c), make_catalog_bc('periodic', dim=N, p=p), None


def _example6(params: Dict[str, Any], N: int, p: float, T: float):
    c = _coordinates(N, params.get('c', [1.0]), 'c')
    xi = make_catalog_bc('sturm-liouville', {'theta': params.get('theta', 1.0), 'eta': params.get('eta', 1.0)},
                         N, p)
    return zero_map(N), constant_field(c), xi, None


CATALOG: Dict[str, Dict[str, Any]] = {
    'example1': {
        'name': 'example1',
        'description': "Conditions de bord ξ = ∂δ_{K₁×K₂} (cônes normaux produits), champ affine ζ + c",
        'defaults': {'N': 2, 'p': 2.0, 'T': 1.0},
        'parameters': {
            'type': 'object',
            'properties': {
                'K1': dict(_SET, default={'type': 'box', 'lower': [-0.5, -0.5], 'upper': [0.5, 0.5]}),
                'K2': dict(_SET, default={'type': 'ball', 'center': [0.0, 0.0], 'radius': 0.25}),
                'c': dict(_VECTOR, description="Décalage du champ affine", default=[1.0, -0.5]),
            },
        },
        'builder': _example1,
    },
    'example2': {
        'name': 'example2',
        'description': "Inégalité variationnelle d'évolution : obstacle x ≥ 0, extrémités fixées à 0",
        'defaults': {'N': 1, 'p': 2.0, 'T': 1.0},
        'solver': {'lambda_schedule': list(OBSTACLE_SCHEDULE)},
        'parameters': {
            'type': 'object',
            'properties': {
                'scale': dict(_NUMBER, description="Amplitude du second membre en escalier", default=1.0),
                't_star': dict(_NUMBER, description="Instant du saut", exclusiveMinimum=0, default=0.5),
            },
        },
        'builder': _example2,
    },
    'example3': {
        'name': 'example3',
        'description': "Problème de Dirichlet x(0) = x(T) = 0, solution manufacturée sin(πt/T)",
        'defaults': {'N': 1, 'p': 2.0, 'T': 1.0},
        'reference': 'msin',
        'parameters': {'type': 'object', 'properties': {}},
        'builder': _example3,
    },
    'example4': {
        'name': 'example4',
        'description': "Problème de Neumann x′(0) = x′(T) = 0, champ affine ζ + c",
        'defaults': {'N': 1, 'p': 2.0, 'T': 1.0},
        'parameters': {
            'type': 'object',
            'properties': {'c': dict(_VECTOR, default=[0.5])},
        },
        'builder': _example4,
    },
    'example5': {
        'name': 'example5',
        'description': "Problème périodique x(0) = x(T), x′(0) = x′(T), H₀ automatiquement satisfaite",
        'defaults': {'N': 2, 'p': 2.0, 'T': 1.0},
        'parameters': {
            'type': 'object',
            'properties': {
                'A': {'type': 'string', 'enum': ['identity', 'zero', 'orthant-cone', 'prox-l1'],
                      'default': 'identity'},
                'a_scale': dict(_NUMBER, minimum=0, default=1.0),
                'c': dict(_VECTOR, description="Champ constant", default=[0.5, -0.25]),
            },
        },
        'builder': _example5,
    },
    'example6': {
        'name': 'example6',
        'description': "Conditions de Sturm–Liouville x(0) − θx′(0) = 0, x(T) + ηx′(T) = 0",
        'defaults': {'N': 1, 'p': 2.0, 'T': 1.0},
        'parameters': {
            'type': 'object',
            'properties': {
                'theta': dict(_NUMBER, exclusiveMinimum=0, default=1.0),
                'eta': dict(_NUMBER, exclusiveMinimum=0, default=1.0),
                'c': dict(_VECTOR, description="Champ constant", default=[1.0]),
            },
        },
        'builder': _example6,
    },
}


def list_catalog() -> Dict[str, Dict[str, Any]]:
    """Schémas publics du catalogue (sans les constructeurs)"""
    return {name: {k: v for k, v in entry.items() if k != 'builder'} for name, entry in CATALOG.items()}


_TYPE_CHECKS: Dict[str, Callable[[Any], bool]] = {
    'number': lambda v: isinstance(v, (int, float)) and not isinstance(v, bool),
    'array': lambda v: isinstance(v, (list, tuple)),
    'string': lambda v: isinstance(v, str),
    'object': lambda v: isinstance(v, (dict, str)),
}


def validate_catalog_params(name: str, params: Dict[str, Any]) -> None:
    """
    Valide les paramètres d'un exemple contre son schéma

    Raises:
        ValidationError: Exemple inconnu, paramètre inconnu, mal typé ou hors plage
    """
    if name not in CATALOG:
        raise ValidationError(f"exemple inconnu: {name} (disponibles: {', '.join(CATALOG)})",
                              key='problem.catalog')
    properties = CATALOG[name]['parameters']['properties']
    for key, value in params.items():
        key_path = f'problem.catalog_params.{key}'
        if key not in properties:
            raise ValidationError(f"paramètre inconnu pour {name}: {key}", key=key_path)
        schema = properties[key]
        if not _TYPE_CHECKS[schema['type']](value):
            raise ValidationError(f"'{key}' doit être de type {schema['type']}, reçu {value!r}", key=key_path)
        if 'enum' in schema and value not in schema['enum']:
            raise ValidationError(f"'{key}' doit être parmi {schema['enum']}", key=key_path)
        if 'exclusiveMinimum' in schema and not value > schema['exclusiveMinimum']:
            raise ValidationError(f"'{key}' doit être > {schema['exclusiveMinimum']}, reçu {value}", key=key_path)
        if 'minimum' in schema and value < schema['minimum']:
            raise ValidationError(f"'{key}' doit être ≥ {schema['minimum']}, reçu {value}", key=key_path)


def parse_reference(reference: str) -> Tuple[str, str]:
    """Décompose 'builtin:nom', 'plugin:module.attr' ou un nom nu en (source, cible)"""
    source, sep, target = str(reference).partition(':')
    if not sep:
        return 'builtin', source
    if source not in ('builtin', 'plugin'):
        raise ValidationError(f"référence invalide: {reference}")
    return source, target


def uses_plugins(cfg: 'RunConfig') -> bool:
    refs = [cfg.field.name, cfg.problem.A, cfg.boundary.kind]
    return any(ref is not None and parse_reference(ref)[0] == 'plugin' for ref in refs)


def _default_plugin_manager() -> 'PluginManager':
    from ..plugins.plugin_manager import PluginManager
    return PluginManager(os.getenv('PLAP_PLUGINS_DIR', './plugins'))


def _build_field(cfg: 'RunConfig', N: int, p: float, T: float, plugins) -> MultiField:
    source, target = parse_reference(cfg.field.name)
    if source == 'plugin':
        built = plugins.build(target, dim=N, T=T, p=p, **cfg.field.params)
        if not isinstance(built, MultiField):
            raise ValidationError(f"le plug-in '{target}' ne renvoie pas un MultiField", key='field.name')
        return built
    return make_builtin_field(target, N, T, p, cfg.field.params)


def build_components(cfg: 'RunConfig', plugins: Optional['PluginManager'] = None) -> ProblemComponents:
    """
    Résout une configuration en opérateurs A, F et ξ

    Args:
        cfg: Configuration validée
        plugins: Gestionnaire de plug-ins (créé à la demande si une référence 'plugin:' apparaît)

    Returns:
        ProblemComponents: Composantes, valeurs par défaut du solveur et référence d'étude
    """
    problem = cfg.problem
    if plugins is None and uses_plugins(cfg):
        plugins = _default_plugin_manager()

    if problem.catalog is not None:
        entry = CATALOG[problem.catalog]
        defaults = entry['defaults']
        N = int(problem.N if problem.N is not None else defaults['N'])
        p = float(problem.p if problem.p is not None else defaults['p'])
        T = float(problem.T if problem.T is not None else defaults['T'])
        A, F, xi, M_default = entry['builder'](dict(problem.catalog_params), N, p, T)
        if cfg.field.name is not None:
            F = _build_field(cfg, N, p, T, plugins)
        reference = entry.get('reference')
        if cfg.field.name is not None:
            reference = parse_reference(cfg.field.name)[1] if reference else None
        return ProblemComponents(
            N=N, p=p, T=T, M=problem.M if problem.M is not None else M_default,
            A=A, F=F, xi=xi, name=problem.name or problem.catalog,
            solver_defaults=dict(entry.get('solver', {})), reference=reference,
        )

    N, p, T = int(problem.N), float(problem.p), float(problem.T)
    source, target = parse_reference(problem.A or 'zero')
    if source == 'plugin':
        A = plugins.build(target, dim=N, T=T, p=p, **problem.A_params)
    else:
        A = make_monotone_map(target, problem.A_params, N)

    source, target = parse_reference(cfg.boundary.kind)
    if source == 'plugin':
        xi = plugins.build(target, dim=N, T=T, p=p, **cfg.boundary.params)
    else:
        xi = make_catalog_bc(target, cfg.boundary.params, N, p)

    from ..solver.study import REFERENCE_SOLUTIONS

    F = _build_field(cfg, N, p, T, plugins)
    target = parse_reference(cfg.field.name)[1]
    reference = target if target in REFERENCE_SOLUTIONS else None
    return ProblemComponents(N=N, p=p, T=T, M=problem.M, A=A, F=F, xi=xi,
                             name=problem.name or 'inline', reference=reference)


def build_problem(cfg: 'RunConfig', plugins: Optional['PluginManager'] = None) -> Tuple['ProblemSpec', 'SolverConfig']:
    """Construit le ProblemSpec et le SolverConfig (défauts du catalogue puis section [solver])"""
    from ..solver.problem import ProblemSpec, SolverConfig

    parts = build_components(cfg, plugins)
    spec = ProblemSpec(N=parts.N, p=parts.p, T=parts.T, A=parts.A, F=parts.F, xi=parts.xi,
                       M=parts.M, name=parts.name)
    solver_params = dict(parts.solver_defaults)
    solver_params.update(cfg.solver)
    config = SolverConfig(**solver_params)
    logger.info(f"Problème '{spec.name}' construit: N={spec.N}, p={spec.p.p:g}, T={spec.T:g}, "
                f"A={spec.A.name}, ξ={spec.xi.name}, variante {spec.variant}")
    return spec, config
