"""
Opérateur de bord ξ sur ℝᴺ × ℝᴺ
Résidu d'inclusion par résolvante, catalogue des conditions aux limites, vérificateurs H(ξ) et H₀
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy import optimize

from .exceptions import ValidationError
from .grid import ExponentLike, phi
from .monotone import GraphSample, MonotoneMap, make_normal_cone
from .reports import HypothesisReport, SAMPLING_NOTE

logger = logging.getLogger(__name__)

BRANCHES = ('sign-condition', 'diagonal-domain', 'declared-unknown')
BC_KINDS = ('dirichlet', 'neumann', 'periodic', 'sturm-liouville', 'product-normal-cone', 'custom')
ROOT_XTOL = 1e-12


@dataclass(frozen=True)
class BCResidual:
    """Résidu (a, a′) − J^ξ_μ((a, a′) + μ(b, b′)) et sa norme euclidienne"""
    value: np.ndarray
    norm: float


@dataclass(frozen=True)
class BoundaryOperator:
    """
    Opérateur maximal monotone ξ présenté par sa résolvante sur ℝ²ᴺ

    sampler, s'il est fourni, produit des couples exacts du graphe
    (w ↦ (z, v)) à partir de points w ∈ ℝ²ᴺ.
    """
    dim: int
    kind: str
    resolvent_fn: Callable[[float, np.ndarray], np.ndarray]
    hxi_branch: str = 'declared-unknown'
    sampler: Optional[Callable[[float, np.ndarray], Any]] = None
    name: str = ''
    params: Dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.hxi_branch not in BRANCHES:
            raise ValidationError(f"branche H(ξ) inconnue: {self.hxi_branch}", key='hxi_branch')

    @property
    def catalog(self) -> bool:
        return self.kind != 'custom'

    def resolvent(self, mu: float, z) -> np.ndarray:
        if not mu > 0:
            raise ValidationError(f"μ doit être > 0, reçu {mu}", key='mu')
        z = np.asarray(z, dtype=float)
        if z.shape[-1] != 2 * self.dim:
            raise ValidationError(f"vecteur de bord de forme {z.shape}, 2N = {2 * self.dim} attendu")
        return self.resolvent_fn(float(mu), z)

    def split(self, z: np.ndarray):
        return z[..., :self.dim], z[..., self.dim:]


def bc_residual(xi: BoundaryOperator, mu: float, a, a_T, b, b_T) -> BCResidual:
    """
    Résidu de l'inclusion (b, b_T) ∈ ξ(a, a_T)

    Args:
        xi: Opérateur de bord
        mu: Paramètre de résolvante > 0
        a, a_T: Valeurs x(0), x(T)
        b, b_T: φ(x′(0)), −φ(x′(T))

    Returns:
        BCResidual: Nul si et seulement si l'inclusion est satisfaite
    """
    point = np.concatenate([np.atleast_1d(a), np.atleast_1d(a_T)]).astype(float)
    dual = np.concatenate([np.atleast_1d(b), np.atleast_1d(b_T)]).astype(float)
    value = point - xi.resolvent(mu, point + mu * dual)
    return BCResidual(value=value, norm=float(np.linalg.norm(value)))


def _sturm_liouville_ray(p: float, scale: float):
    """Résout s + μ s^{p−1}/scale = ρ sur [0, ρ] (monotone en s)"""
    def solve(mu, w):
        rho = float(np.linalg.norm(w))
        if rho == 0.0:
            return np.zeros_like(w)
        if p == 2.0:
            s = rho / (1.0 + mu / scale)
        else:
            s = optimize.brentq(lambda s: s + mu * s ** (p - 1.0) / scale - rho, 0.0, rho,
                                xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps)
        return (s / rho) * w
    return solve


def make_catalog_bc(kind: str, params: Optional[Dict[str, Any]] = None, dim: int = 1,
                    p: ExponentLike = 2.0) -> BoundaryOperator:
    """
    Construit un opérateur de bord du catalogue

    Args:
        kind: dirichlet, neumann, periodic, sturm-liouville, product-normal-cone
        params: θ, η pour Sturm–Liouville ; K1, K2 pour les cônes produits
        dim: Dimension N
        p: Exposant (Sturm–Liouville)

    Returns:
        BoundaryOperator: Opérateur avec sa résolvante et sa branche H(ξ)
    """
    params = dict(params or {})
    kind = kind.lower()
    p_val = p.p if hasattr(p, 'p') else float(p)
    n = dim

    if kind == 'dirichlet':
        return BoundaryOperator(dim, 'dirichlet', lambda mu, z: np.zeros_like(z),
                                'sign-condition', name='dirichlet')

    if kind == 'neumann':
        return BoundaryOperator(dim, 'neumann', lambda mu, z: np.array(z, copy=True),
                                'sign-condition', name='neumann')

    if kind == 'periodic':
        def average(mu, z):
            mean = 0.5 * (z[..., :n] + z[..., n:])
            return np.concatenate([mean, mean], axis=-1)

        def sample_periodic(mu, w):
            mean = 0.5 * (w[..., :n] + w[..., n:])
            half = 0.5 * (w[..., :n] - w[..., n:]) / mu
            return np.concatenate([mean, mean], axis=-1), np.concatenate([half, -half], axis=-1)

        return BoundaryOperator(dim, 'periodic', average, 'diagonal-domain',
                                sampler=sample_periodic, name='periodic')

    if kind == 'sturm-liouville':
        theta = float(params.get('theta', 1.0))
        eta = float(params.get('eta', 1.0))
        if theta <= 0 or eta <= 0:
            raise ValidationError(f"Sturm–Liouville: θ et η doivent être > 0 (θ={theta}, η={eta})",
                                  key='boundary.theta' if theta <= 0 else 'boundary.eta')
        left = _sturm_liouville_ray(p_val, theta ** (p_val - 1.0))
        right = _sturm_liouville_ray(p_val, eta ** (p_val - 1.0))

        def sl_resolvent(mu, z):
            flat = z.reshape(-1, 2 * n)
            out = np.vstack([np.concatenate([left(mu, row[:n]), right(mu, row[n:])]) for row in flat])
            return out.reshape(z.shape)

        return BoundaryOperator(dim, 'sturm-liouville', sl_resolvent, 'sign-condition',
                                name=f'sturm-liouville(θ={theta:g}, η={eta:g})',
                                params={'theta': theta, 'eta': eta, 'p': p_val})

    if kind == 'product-normal-cone':
        if 'K1' not in params or 'K2' not in params:
            raise ValidationError("cônes produits: paramètres 'K1' et 'K2' requis", key='boundary.K1')
        K1 = make_normal_cone(params['K1'], dim)
        K2 = make_normal_cone(params['K2'], dim)
        if K1.dim != dim or K2.dim != dim:
            raise ValidationError("K1/K2 de dimension incompatible avec N", key='boundary.K1')

        def product_projection(mu, z):
            return np.concatenate([K1.resolvent(mu, z[..., :n]), K2.resolvent(mu, z[..., n:])], axis=-1)

        contains_origin = K1.params['contains_origin'] and K2.params['contains_origin']
        return BoundaryOperator(dim, 'product-normal-cone', product_projection,
                                'sign-condition' if contains_origin else 'declared-unknown',
                                name=f'N[{K1.name} × {K2.name}]',
                                params={'K1': K1, 'K2': K2})

    raise ValidationError(f"condition aux limites inconnue: {kind}", key='boundary.kind')


def make_custom_bc(dim: int, resolvent_fn: Callable[[float, np.ndarray], np.ndarray],
                   hxi_branch: str = 'declared-unknown', name: str = 'custom') -> BoundaryOperator:
    """Opérateur de bord utilisateur défini par sa résolvante sur ℝ²ᴺ"""
    def vectorized(mu, z):
        if z.ndim == 1:
            return np.asarray(resolvent_fn(mu, z), dtype=float)
        flat = z.reshape(-1, 2 * dim)
        return np.vstack([resolvent_fn(mu, row) for row in flat]).reshape(z.shape)
    return BoundaryOperator(dim, 'custom', vectorized, hxi_branch, name=name)


def sample_graph(xi: BoundaryOperator, count: int = 64, seed: int = 0, mu: float = 1.0,
                 scale: float = 2.0) -> List[GraphSample]:
    """
    Échantillonne le graphe de ξ par la résolvante

    z = J_μ(w), v = (w − z)/μ donne (z, v) ∈ Gr ξ pour tout w ∈ ℝ²ᴺ.
    """
    rng = np.random.default_rng(seed)
    W = scale * rng.standard_normal((count, 2 * xi.dim))
    if xi.sampler is not None:
        Z, V = xi.sampler(mu, W)
    else:
        Z = xi.resolvent(mu, W)
        V = (W - Z) / mu
    return [GraphSample(point=Z[k], value=V[k]) for k in range(count)]


def _graph_gap(xi: BoundaryOperator, sample: GraphSample, mu: float = 1.0) -> float:
    z, v = np.asarray(sample.point, dtype=float), np.asarray(sample.value, dtype=float)
    return float(np.linalg.norm(z - xi.resolvent(mu, z + mu * v)))


def check_zero_in_bc(xi: BoundaryOperator, mus: Sequence[float] = (1.0, 0.1), tol: float = 1e-12) -> HypothesisReport:
    """Vérifie (0, 0) ∈ ξ(0, 0) via J^ξ_μ(0) = 0"""
    zero = np.zeros(2 * xi.dim)
    norms = [float(np.linalg.norm(xi.resolvent(mu, zero))) for mu in mus]
    k = int(np.argmax(norms))
    return HypothesisReport(
        name='H(ξ): (0,0) ∈ ξ(0,0)',
        passed=norms[k] <= tol,
        value=norms[k],
        witness={'mu': mus[k]},
        sample_count=len(mus),
        evidence='resolvent-identity',
        by_construction=xi.catalog and norms[k] <= tol,
    )


def check_h_xi(xi: BoundaryOperator, graph_samples: Sequence[GraphSample], tol: float = 1e-9,
               graph_tol: float = 1e-8) -> HypothesisReport:
    """
    Vérifie H(ξ) sur des couples du graphe

    Branche signe : min (b, a) et (b′, a′) ; branche diagonale : max ‖a − a′‖.

    Args:
        xi: Opérateur de bord
        graph_samples: Couples ((a, a′), (b, b′)) du graphe
        tol: Tolérance du verdict
        graph_tol: Tolérance du test d'appartenance au graphe

    Returns:
        HypothesisReport: Valeur extrême, témoin et verdict
    """
    n = xi.dim
    for k, sample in enumerate(graph_samples):
        gap = _graph_gap(xi, sample)
        if gap > graph_tol * max(1.0, float(np.linalg.norm(sample.point))):
            raise ValidationError(f"échantillon {k} hors du graphe de ξ (écart {gap:.3e})", key='graph_samples')

    signs, deviations = [], []
    for sample in graph_samples:
        z, v = np.asarray(sample.point, dtype=float), np.asarray(sample.value, dtype=float)
        signs.append(min(float(v[:n] @ z[:n]), float(v[n:] @ z[n:])))
        deviations.append(float(np.linalg.norm(z[:n] - z[n:])))

    count = len(graph_samples)
    if count == 0:
        return HypothesisReport(name=f'H(ξ) [{xi.hxi_branch}]', passed=True, sample_count=0,
                                by_construction=xi.catalog, note='aucun échantillon')

    if xi.hxi_branch == 'diagonal-domain':
        k = int(np.argmax(deviations))
        value, passed = deviations[k], deviations[k] <= tol
    elif xi.hxi_branch == 'sign-condition':
        k = int(np.argmin(signs))
        value, passed = signs[k], signs[k] >= -tol
    else:
        k = int(np.argmin(signs))
        value = signs[k]
        passed = value >= -tol or max(deviations) <= tol

    return HypothesisReport(
        name=f'H(ξ) [{xi.hxi_branch}]',
        passed=bool(passed),
        value=value,
        witness={'a': graph_samples[k].point[:n], 'a_T': graph_samples[k].point[n:],
                 'b': graph_samples[k].value[:n], 'b_T': graph_samples[k].value[n:]},
        sample_count=count,
        by_construction=xi.catalog and xi.hxi_branch != 'declared-unknown',
        note=SAMPLING_NOTE,
    )


def check_h0(A: MonotoneMap, xi: BoundaryOperator, lambdas: Sequence[float],
             graph_samples: Sequence[GraphSample], tol: float = 1e-9) -> HypothesisReport:
    """
    Vérifie H₀ : (A_λ(a), b) + (A_λ(a′), b′) ≥ 0 sur le graphe de ξ

    Returns:
        HypothesisReport: Minimum sur λ et échantillons, témoin et verdict
    """
    if any(not lam > 0 for lam in lambdas):
        raise ValidationError("H₀: tous les λ doivent être > 0", key='lambdas')
    if A.dim != xi.dim:
        raise ValidationError(f"dimensions incompatibles: A ({A.dim}) et ξ ({xi.dim})")
    n = xi.dim
    best, witness = np.inf, None
    for lam in lambdas:
        for sample in graph_samples:
            z, v = np.asarray(sample.point, dtype=float), np.asarray(sample.value, dtype=float)
            value = float(np.sum(A.yosida(lam, z[:n]) * v[:n])) + float(np.sum(A.yosida(lam, z[n:]) * v[n:]))
            if value < best:
                best, witness = value, {'lambda': lam, 'a': z[:n], 'a_T': z[n:], 'b': v[:n], 'b_T': v[n:]}
    if witness is None:
        best = 0.0
    return HypothesisReport(
        name='H₀',
        passed=bool(best >= -tol),
        value=float(best),
        witness=witness,
        sample_count=len(lambdas) * len(graph_samples),
        note=SAMPLING_NOTE,
    )
