"""
Plug-in d'exemple
Champ à valeurs non convexes muni de sa sélection continue, et opérateur monotone cubique
"""

import numpy as np

from src.core.fields import MultiField
from src.core.monotone import MonotoneMap, custom_from_function


def two_point_field(dim: int, T: float = 1.0, p: float = 2.0, c: float = 0.5) -> MultiField:
    """
    F(t, ζ) = {ζ + c e₁, ζ − c e₁}, deux points donc non convexe

    La sélection ζ + c e₁ est continue ; la condition de Hartman tient pour M ≥ c.
    """
    shift = np.zeros(dim)
    shift[0] = float(c)

    def member(t, zeta, u, tol):
        scale = tol * max(1.0, float(np.linalg.norm(u)))
        return (np.linalg.norm(u - zeta - shift) <= scale) or (np.linalg.norm(u - zeta + shift) <= scale)

    return MultiField(
        dim=dim,
        select=lambda t, z: z + shift,
        member=member,
        convex_valued=False,
        growth_bound=lambda k: k + abs(float(c)),
        name='two-point',
        params={'c': float(c)},
    )


def cubic_map(dim: int, T: float = 1.0, p: float = 2.0, c: float = 1.0) -> MonotoneMap:
    """A(ζ) = c ζ³ composante par composante (monotone, domaine plein)"""
    c = float(c)
    return custom_from_function(dim, lambda z: c * np.asarray(z) ** 3, name=f'cubic(c={c:g})')


PLUGIN_CONFIG = {
    'name': 'example_plugin',
    'version': '1.0.0',
    'description': "Champ non convexe à deux points et opérateur cubique",
    'factories': ['two_point_field', 'cubic_map'],
}
