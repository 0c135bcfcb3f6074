"""
Vocabulaire commun : exposant, grilles, trajectoires discrètes
Homéomorphisme φ(ζ) = ‖ζ‖^{p−2}ζ, son inverse et normes discrètes
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .exceptions import ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Exponent:
    """Exposant p ≥ 2 et son conjugué p′ = p/(p−1)"""
    p: float
    p_conj: float = field(init=False)

    def __post_init__(self):
        p = float(self.p)
        if not np.isfinite(p) or p < 2.0:
            raise ValidationError(f"p doit être ≥ 2 (p must be ≥ 2), reçu {self.p}", key='p')
        object.__setattr__(self, 'p', p)
        object.__setattr__(self, 'p_conj', p / (p - 1.0))


ExponentLike = Union[Exponent, float, int]


def as_exponent(p: ExponentLike) -> Exponent:
    return p if isinstance(p, Exponent) else Exponent(float(p))


def _p_value(p: ExponentLike) -> float:
    return p.p if isinstance(p, Exponent) else float(p)


def phi(p: ExponentLike, zeta) -> np.ndarray:
    """
    Applique φ(ζ) = ‖ζ‖^{p−2}ζ le long du dernier axe

    Args:
        p: Exposant (≥ 2)
        zeta: Vecteur ou tableau (..., N)

    Returns:
        np.ndarray: φ(ζ), nul exactement en ζ = 0
    """
    p = _p_value(p)
    z = np.asarray(zeta, dtype=float)
    if p == 2.0:
        return z.copy()
    if z.ndim == 0:
        return np.abs(z) ** (p - 2.0) * z
    norm = np.linalg.norm(z, axis=-1, keepdims=True)
    return norm ** (p - 2.0) * z


def phi_inverse(p: ExponentLike, eta) -> np.ndarray:
    """
    Inverse de φ : η ↦ ‖η‖^{p′−2}η

    Args:
        p: Exposant (≥ 2)
        eta: Vecteur ou tableau (..., N)

    Returns:
        np.ndarray: φ⁻¹(η), nul exactement en η = 0
    """
    p = _p_value(p)
    e = np.asarray(eta, dtype=float)
    if p == 2.0:
        return e.copy()
    q = p / (p - 1.0)
    norm = np.abs(e) if e.ndim == 0 else np.linalg.norm(e, axis=-1, keepdims=True)
    safe = np.where(norm > 0.0, norm, 1.0)
    scale = np.where(norm > 0.0, safe ** (q - 2.0), 0.0)
    return scale * e


@dataclass(frozen=True)
class Grid:
    """Grille uniforme de [0, T] à n intervalles"""
    T: float
    n: int

    def __post_init__(self):
        if not np.isfinite(self.T) or self.T <= 0:
            raise ValidationError(f"T doit être > 0, reçu {self.T}", key='T')
        if int(self.n) != self.n or self.n < 2:
            raise ValidationError(f"n doit être un entier ≥ 2, reçu {self.n}", key='n')
        object.__setattr__(self, 'T', float(self.T))
        object.__setattr__(self, 'n', int(self.n))

    @property
    def h(self) -> float:
        return self.T / self.n

    @property
    def nodes(self) -> np.ndarray:
        t = np.arange(self.n + 1) * self.T / self.n
        t[-1] = self.T
        return t

    @property
    def midpoints(self) -> np.ndarray:
        t = self.nodes
        return 0.5 * (t[:-1] + t[1:])

    def trapezoid_weights(self) -> np.ndarray:
        w = np.ones(self.n + 1)
        w[0] = w[-1] = 0.5
        return w


@dataclass(frozen=True)
class TrajectoryGrid:
    """Valeurs nodales x_0..x_n ∈ ℝᴺ sur une grille uniforme (lecture seule)"""
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2 or values.shape[0] != self.grid.n + 1:
            raise ValidationError(
                f"trajectoire de forme {values.shape} incompatible avec n+1 = {self.grid.n + 1} nœuds"
            )
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def times(self) -> np.ndarray:
        return self.grid.nodes

    def differences(self) -> np.ndarray:
        """Quotients d_{i+1/2} = (x_{i+1} − x_i)/h, forme (n, N)"""
        return np.diff(self.values, axis=0) / self.grid.h

    def fluxes(self, p: ExponentLike) -> np.ndarray:
        """Flux aux demi-nœuds φ(d_{i+1/2}), forme (n, N)"""
        return phi(p, self.differences())

    def max_norm(self) -> float:
        return float(np.max(np.linalg.norm(self.values, axis=1)))

    def with_values(self, values) -> 'TrajectoryGrid':
        return TrajectoryGrid(self.grid, np.asarray(values, dtype=float).reshape(self.values.shape))

    def flat(self) -> np.ndarray:
        return self.values.reshape(-1).copy()

    @classmethod
    def zeros(cls, grid: Grid, dim: int) -> 'TrajectoryGrid':
        return cls(grid, np.zeros((grid.n + 1, dim)))

    @classmethod
    def from_function(cls, grid: Grid, func: Callable[[float], np.ndarray],
                      dim: Optional[int] = None) -> 'TrajectoryGrid':
        rows = [np.atleast_1d(np.asarray(func(t), dtype=float)) for t in grid.nodes]
        values = np.vstack(rows)
        if dim is not None and values.shape[1] != dim:
            raise ValidationError(f"fonction de dimension {values.shape[1]}, attendu {dim}")
        return cls(grid, values)


def discrete_lp_norm(p: float, traj: TrajectoryGrid) -> float:
    """
    Norme Lp discrète par la règle des trapèzes

    Args:
        p: Exposant ≥ 1
        traj: Trajectoire

    Returns:
        float: (Σ w_i h ‖x_i‖^p)^{1/p}
    """
    if p < 1:
        raise ValidationError(f"p doit être ≥ 1 pour une norme, reçu {p}", key='p')
    norms = np.linalg.norm(traj.values, axis=1)
    total = np.sum(traj.grid.trapezoid_weights() * traj.grid.h * norms ** p)
    return float(total ** (1.0 / p))
