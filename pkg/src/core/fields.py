"""
Champ multivoque F(t, ζ) et ses vérificateurs
Sélections, rétraction radiale, champ tronqué, condition de Hartman, croissance
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import norm as normal_law
from scipy.stats import qmc

from .exceptions import ValidationError
from .grid import ExponentLike, phi
from .reports import HypothesisReport, SAMPLING_NOTE

logger = logging.getLogger(__name__)

TOL_HARTMAN = 1e-9
DEFAULT_T_SAMPLES = 128
DEFAULT_SPHERE_SAMPLES = 64


@dataclass(frozen=True)
class MultiField:
    """
    Champ multivoque présenté par une sélection continue

    member teste u ∈ F(t, ζ) ; par défaut le champ est univoque et member
    compare à la sélection.
    """
    dim: int
    select: Callable[[float, np.ndarray], np.ndarray]
    member: Optional[Callable[[float, np.ndarray, np.ndarray, float], bool]] = None
    convex_valued: bool = True
    growth_bound: Optional[Callable[[float], float]] = None
    name: str = 'custom'
    params: Dict[str, Any] = field(default_factory=dict, compare=False)

    def __call__(self, t: float, zeta) -> np.ndarray:
        return np.asarray(self.select(float(t), np.asarray(zeta, dtype=float)), dtype=float).reshape(self.dim)

    def contains(self, t: float, zeta, u, tol: float = 1e-9) -> bool:
        zeta = np.asarray(zeta, dtype=float)
        u = np.asarray(u, dtype=float)
        if self.member is not None:
            return bool(self.member(float(t), zeta, u, tol))
        return bool(np.linalg.norm(u - self(t, zeta)) <= tol * max(1.0, np.linalg.norm(u)))

    def trace(self, times: np.ndarray, values: np.ndarray) -> np.ndarray:
        """Trace de sélection f_i = select(t_i, x_i), forme (n+1, N)"""
        return np.vstack([self(t, x) for t, x in zip(times, values)])


def radial_retraction(M: float, zeta) -> np.ndarray:
    """
    Rétraction M-radiale p_M (projection sur la boule de rayon M)

    Args:
        M: Rayon > 0
        zeta: Vecteur ou tableau (..., N)

    Returns:
        np.ndarray: ζ si ‖ζ‖ ≤ M, sinon Mζ/‖ζ‖
    """
    if not M > 0:
        raise ValidationError(f"M doit être > 0, reçu {M}", key='M')
    z = np.asarray(zeta, dtype=float)
    rho = np.linalg.norm(z, axis=-1, keepdims=True)
    outside = rho > M
    scale = np.where(outside, M / np.where(outside, rho, 1.0), 1.0)
    return z * scale


def truncated_select(field: MultiField, p: ExponentLike, M: float, t: float, zeta) -> np.ndarray:
    """Élément −select(t, p_M(ζ)) + φ(p_M(ζ)) du champ modifié F₁"""
    retracted = radial_retraction(M, zeta)
    return -field(t, retracted) + phi(p, retracted)


def sphere_points(dim: int, count: int = DEFAULT_SPHERE_SAMPLES, radius: float = 1.0, seed: int = 0) -> np.ndarray:
    """
    Points déterministes sur la sphère de rayon donné

    Spirale régulière en dimension 2 et 3, suite de Halton brouillée au-delà ;
    les 2N points ±e_k sont toujours ajoutés.
    """
    if dim == 1:
        base = np.array([[1.0], [-1.0]])
    elif dim == 2:
        angles = 2.0 * np.pi * np.arange(count) / count
        base = np.column_stack([np.cos(angles), np.sin(angles)])
    elif dim == 3:
        k = np.arange(count) + 0.5
        polar = np.arccos(1.0 - 2.0 * k / count)
        azimuth = np.pi * (1.0 + 5.0 ** 0.5) * k
        base = np.column_stack([np.cos(azimuth) * np.sin(polar),
                                np.sin(azimuth) * np.sin(polar),
                                np.cos(polar)])
    else:
        sampler = qmc.Halton(d=dim, scramble=True, seed=seed)
        gauss = normal_law.ppf(np.clip(sampler.random(count), 1e-12, 1.0 - 1e-12))
        base = gauss / np.linalg.norm(gauss, axis=1, keepdims=True)
    axes = np.vstack([np.eye(dim), -np.eye(dim)])
    return radius * np.vstack([base, axes])


@dataclass
class HartmanReport:
    """Résultat de la vérification de la condition de Hartman sur la sphère de rayon M"""
    M: float
    sample_count: int
    min_inner_product: float
    witness: Tuple[float, np.ndarray, np.ndarray]
    passed: bool
    tol: float = TOL_HARTMAN
    note: str = SAMPLING_NOTE

    def to_hypothesis(self) -> HypothesisReport:
        t, zeta, u = self.witness
        return HypothesisReport(
            name='H(F): condition de Hartman',
            passed=self.passed,
            value=self.min_inner_product,
            witness={'t': t, 'zeta': zeta, 'u': u},
            sample_count=self.sample_count,
            note=self.note,
            extra={'M': self.M},
        )


def check_hartman(field: MultiField, M: float, t_samples: int = DEFAULT_T_SAMPLES,
                  sphere_samples: int = DEFAULT_SPHERE_SAMPLES, T: float = 1.0,
                  tol: float = TOL_HARTMAN, seed: int = 0) -> HartmanReport:
    """
    Évalue min (select(t, ζ), ζ) sur ‖ζ‖ = M

    Args:
        field: Champ multivoque
        M: Rayon de Hartman
        t_samples: Nombre d'instants sur [0, T]
        sphere_samples: Nombre de points de sphère (hors axes)
        T: Horizon
        tol: Tolérance du verdict

    Returns:
        HartmanReport: Minimum, témoin et verdict (évidence, pas preuve)
    """
    if not M > 0 or t_samples < 1 or sphere_samples < 1:
        raise ValidationError("M > 0 et nombres d'échantillons ≥ 1 requis", key='M')
    times = np.linspace(0.0, T, t_samples)
    points = sphere_points(field.dim, sphere_samples, M, seed)
    best, witness = np.inf, None
    for t in times:
        for zeta in points:
            u = field(t, zeta)
            value = float(u @ zeta)
            if value < best:
                best, witness = value, (float(t), zeta.copy(), u)
    count = len(times) * len(points)
    passed = best >= -tol
    logger.debug(f"Hartman M={M:g}: min={best:.3e} sur {count} échantillons")
    return HartmanReport(M=float(M), sample_count=count, min_inner_product=best,
                         witness=witness, passed=passed, tol=tol)


def estimate_growth(field: MultiField, k: float, samples: int = DEFAULT_SPHERE_SAMPLES,
                    T: float = 1.0, t_samples: int = DEFAULT_T_SAMPLES, seed: int = 0) -> float:
    """
    Borne inférieure empirique de sup_t a_k(t)

    Échantillonne ‖select(t, ζ)‖ pour ‖ζ‖ ≤ k (sphères concentriques et origine).
    """
    if not k > 0:
        raise ValidationError(f"k doit être > 0, reçu {k}", key='k')
    sphere = sphere_points(field.dim, samples, 1.0, seed)
    points = np.vstack([np.zeros((1, field.dim))] + [r * k * sphere for r in (0.25, 0.5, 0.75, 1.0)])
    best = 0.0
    for t in np.linspace(0.0, T, t_samples):
        for zeta in points:
            best = max(best, float(np.linalg.norm(field(t, zeta))))
    return best


def check_selection(field: MultiField, T: float = 1.0, radius: float = 1.0, samples: int = 32,
                    seed: int = 0, tol: float = 1e-9) -> HypothesisReport:
    """Vérifie member(t, ζ, select(t, ζ)) sur des échantillons aléatoires"""
    rng = np.random.default_rng(seed)
    times = rng.uniform(0.0, T, samples)
    points = rng.uniform(-radius, radius, size=(samples, field.dim))
    failures: List[int] = [k for k in range(samples)
                           if not field.contains(times[k], points[k], field(times[k], points[k]), tol)]
    witness = None
    if failures:
        k = failures[0]
        witness = {'t': times[k], 'zeta': points[k]}
    return HypothesisReport(
        name='H(F): sélection ∈ F(t, ζ)',
        passed=not failures,
        value=float(len(failures)),
        witness=witness,
        sample_count=samples,
        note=SAMPLING_NOTE,
    )


def lower_semicontinuity_report(field: MultiField) -> HypothesisReport:
    """Semi-continuité inférieure : déclarée par l'utilisateur, non vérifiable mécaniquement"""
    return HypothesisReport(
        name='H(F): semi-continuité inférieure',
        passed=None,
        evidence='declared',
        note='hypothèse déclarée, non vérifiée' if not field.convex_valued else 'sans objet (valeurs convexes)',
    )


# ---------------------------------------------------------------------------
# Champs intégrés
# ---------------------------------------------------------------------------

def _first_axis(dim: int, value: float) -> np.ndarray:
    out = np.zeros(dim)
    out[0] = value
    return out


def msin_field(dim: int = 1, T: float = 1.0) -> MultiField:
    """F(t, ζ) = {−(π/T)² sin(πt/T) e₁} ; solution de Dirichlet sin(πt/T) e₁"""
    w = np.pi / T
    return MultiField(
        dim=dim,
        select=lambda t, z: _first_axis(dim, -w * w * np.sin(w * t)),
        growth_bound=lambda k: w * w,
        name='msin',
    )


def plap3_field(dim: int = 1, T: float = 1.0, p: ExponentLike = 3.0) -> MultiField:
    """F(t, ζ) = {−2(p−1)|T−2t|^{p−2} e₁} ; solution de Dirichlet t(T−t) e₁"""
    p = p.p if hasattr(p, 'p') else float(p)
    return MultiField(
        dim=dim,
        select=lambda t, z: _first_axis(dim, -2.0 * (p - 1.0) * abs(T - 2.0 * t) ** (p - 2.0)),
        growth_bound=lambda k: 2.0 * (p - 1.0) * T ** (p - 2.0),
        name='plap3',
        params={'p': p},
    )


def constant_field(c: Sequence[float]) -> MultiField:
    """F(t, ζ) = {c}"""
    c = np.atleast_1d(np.asarray(c, dtype=float))
    size = float(np.linalg.norm(c))
    return MultiField(dim=c.size, select=lambda t, z: c.copy(), growth_bound=lambda k: size,
                      name='constant', params={'c': c.tolist()})


def linear_field(dim: int, scale: float = 1.0) -> MultiField:
    """F(t, ζ) = {sζ}"""
    scale = float(scale)
    return MultiField(dim=dim, select=lambda t, z: scale * z, growth_bound=lambda k: abs(scale) * k,
                      name='linear', params={'scale': scale})


def negated_field(dim: int) -> MultiField:
    """F(t, ζ) = {−ζ}"""
    return MultiField(dim=dim, select=lambda t, z: -z, growth_bound=lambda k: k, name='negated')


def affine_field(c: Sequence[float]) -> MultiField:
    """F(t, ζ) = {ζ + c} ; Hartman vérifiée pour M ≥ ‖c‖"""
    c = np.atleast_1d(np.asarray(c, dtype=float))
    size = float(np.linalg.norm(c))
    return MultiField(dim=c.size, select=lambda t, z: z + c, growth_bound=lambda k: k + size,
                      name='affine', params={'c': c.tolist()})


def step_field(g1: Sequence[float], g2: Sequence[float], t_star: float) -> MultiField:
    """F(t, ζ) = {g₁} pour t ≤ t*, {g₂} sinon"""
    g1 = np.atleast_1d(np.asarray(g1, dtype=float))
    g2 = np.atleast_1d(np.asarray(g2, dtype=float))
    if g1.shape != g2.shape:
        raise ValidationError("g1 et g2 de dimensions différentes", key='g2')
    t_star = float(t_star)
    size = float(max(np.linalg.norm(g1), np.linalg.norm(g2)))
    return MultiField(
        dim=g1.size,
        select=lambda t, z: (g1 if t <= t_star else g2).copy(),
        growth_bound=lambda k: size,
        name='step',
        params={'g1': g1.tolist(), 'g2': g2.tolist(), 't_star': t_star},
    )


def tabulated_field(rows: Sequence[Sequence[float]]) -> MultiField:
    """
    Champ donné aux instants t_j, interpolé linéairement en t

    Args:
        rows: Lignes (t, v_1, ..., v_N) à t strictement croissant
    """
    table = np.atleast_2d(np.asarray(rows, dtype=float))
    if table.shape[0] < 2 or table.shape[1] < 2:
        raise ValidationError("table de champ: au moins 2 lignes (t, v...) requises", key='rows')
    times, values = table[:, 0], table[:, 1:]
    if np.any(np.diff(times) <= 0):
        raise ValidationError("table de champ: instants non strictement croissants", key='rows')
    size = float(np.max(np.linalg.norm(values, axis=1)))

    def select(t, z):
        return np.array([np.interp(t, times, values[:, k]) for k in range(values.shape[1])])

    return MultiField(dim=values.shape[1], select=select, growth_bound=lambda k: size,
                      name='tabulated', params={'rows': table.tolist()})


BUILTIN_FIELDS = ('msin', 'plap3', 'constant', 'linear', 'negated', 'affine', 'step', 'tabulated', 'zero')


def make_builtin_field(name: str, dim: int, T: float, p: ExponentLike,
                       params: Optional[Dict[str, Any]] = None) -> MultiField:
    """
    Construit un champ intégré par son nom

    Args:
        name: msin, plap3, constant, linear, negated, affine, step, tabulated, zero
        dim: Dimension N
        T: Horizon
        p: Exposant
        params: Paramètres du champ (c, scale, g1, g2, t_star, rows)

    Returns:
        MultiField: Champ construit
    """
    params = dict(params or {})
    if name == 'msin':
        return msin_field(dim, T)
    if name == 'plap3':
        return plap3_field(dim, T, p)
    if name == 'zero':
        return constant_field(np.zeros(dim))
    if name == 'linear':
        return linear_field(dim, params.get('scale', 1.0))
    if name == 'negated':
        return negated_field(dim)
    if name in ('constant', 'affine'):
        c = np.atleast_1d(np.asarray(params.get('c', np.zeros(dim)), dtype=float))
        if c.size == 1 and dim > 1:
            c = np.full(dim, c[0])
        built = constant_field(c) if name == 'constant' else affine_field(c)
    elif name == 'step':
        for key in ('g1', 'g2'):
            if key not in params:
                raise ValidationError(f"champ 'step': paramètre '{key}' manquant", key=f'field.{key}')
        built = step_field(params['g1'], params['g2'], params.get('t_star', 0.5 * T))
    elif name == 'tabulated':
        if 'rows' not in params:
            raise ValidationError("champ 'tabulated': paramètre 'rows' manquant", key='field.rows')
        built = tabulated_field(params['rows'])
    else:
        raise ValidationError(f"champ intégré inconnu: {name}", key='field')
    if built.dim != dim:
        raise ValidationError(f"champ '{name}' de dimension {built.dim}, N = {dim}", key='field')
    return built
