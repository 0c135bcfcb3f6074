"""
Module core
Vocabulaire mathématique partagé : φ, grilles, opérateurs monotones, champs, opérateurs de bord
"""

from .exceptions import (
    PlapError, ValidationError, ParseError, InvalidProblem, OutOfDomainError, NonConvergence,
)
from .grid import Exponent, Grid, TrajectoryGrid, phi, phi_inverse, discrete_lp_norm
from .monotone import (
    MonotoneMap, GraphSample, resolvent, yosida, minimal_section, make_normal_cone, make_monotone_map,
)
from .fields import (
    MultiField, HartmanReport, radial_retraction, truncated_select, check_hartman, estimate_growth,
    make_builtin_field,
)
from .boundary import (
    BoundaryOperator, BCResidual, bc_residual, make_catalog_bc, check_h_xi, check_h0, sample_graph,
)
from .reports import HypothesisReport

__all__ = [
    'PlapError', 'ValidationError', 'ParseError', 'InvalidProblem', 'OutOfDomainError', 'NonConvergence',
    'Exponent', 'Grid', 'TrajectoryGrid', 'phi', 'phi_inverse', 'discrete_lp_norm',
    'MonotoneMap', 'GraphSample', 'resolvent', 'yosida', 'minimal_section', 'make_normal_cone',
    'make_monotone_map',
    'MultiField', 'HartmanReport', 'radial_retraction', 'truncated_select', 'check_hartman',
    'estimate_growth', 'make_builtin_field',
    'BoundaryOperator', 'BCResidual', 'bc_residual', 'make_catalog_bc', 'check_h_xi', 'check_h0',
    'sample_graph', 'HypothesisReport',
]
