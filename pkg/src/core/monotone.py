"""
Opérateurs maximaux monotones présentés par leur résolvante
Résolvante J_λ, approximation de Yosida A_λ, section minimale, cônes normaux
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Sequence, Union

import numpy as np
from scipy import optimize

from .exceptions import NonConvergence, OutOfDomainError, ValidationError
from .reports import HypothesisReport, SAMPLING_NOTE

logger = logging.getLogger(__name__)

MINIMAL_SECTION_LAMBDA = 1e-8
DOMAIN_PROJECTION_LAMBDA = 1e-10

MAP_KINDS = (
    'zero', 'identity-scaled', 'orthant-cone', 'box-cone', 'point-cone',
    'ball-cone', 'convex-set-cone', 'prox-of-convex', 'custom',
)


@dataclass(frozen=True)
class GraphSample:
    """Couple (point, valeur) du graphe d'un opérateur"""
    point: np.ndarray
    value: np.ndarray


@dataclass(frozen=True)
class MonotoneMap:
    """
    Opérateur maximal monotone sur ℝᵈ défini par sa résolvante

    resolvent_fn et projection_fn sont vectorisées sur le dernier axe.
    resolvent_derivative_fn, lorsqu'elle existe, renvoie une dérivée
    généralisée de J_λ en un point (matrice d×d).
    """
    dim: int
    kind: str
    resolvent_fn: Callable[[float, np.ndarray], np.ndarray]
    projection_fn: Callable[[np.ndarray], np.ndarray]
    contains_fn: Callable[[np.ndarray, np.ndarray, float], bool]
    minimal_section_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    resolvent_derivative_fn: Optional[Callable[[float, np.ndarray], np.ndarray]] = None
    support_fn: Optional[Callable[[np.ndarray, float], float]] = None
    full_domain: bool = False
    name: str = ''
    params: Dict[str, Any] = field(default_factory=dict, compare=False)

    def _check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 0 or x.shape[-1] != self.dim:
            raise ValidationError(f"vecteur de forme {x.shape} pour un opérateur de dimension {self.dim}")
        return x

    def resolvent(self, lam: float, x) -> np.ndarray:
        if not lam > 0:
            raise ValidationError(f"λ doit être > 0, reçu {lam}", key='lambda')
        return self.resolvent_fn(float(lam), self._check(x))

    def yosida(self, lam: float, x) -> np.ndarray:
        x = self._check(x)
        return (x - self.resolvent(lam, x)) / lam

    def domain_projection(self, x) -> np.ndarray:
        return self.projection_fn(self._check(x))

    def in_domain(self, x, tol: float = 1e-8) -> bool:
        x = self._check(x)
        return bool(np.linalg.norm(self.domain_projection(x) - x) <= tol * max(1.0, np.linalg.norm(x)))

    def graph_contains(self, x, v, tol: float = 1e-8) -> bool:
        return bool(self.contains_fn(self._check(x), self._check(v), tol))

    def minimal_section(self, x, tol: float = 1e-8) -> np.ndarray:
        x = self._check(x)
        if not self.in_domain(x, tol):
            raise OutOfDomainError(f"{x.tolist()} n'appartient pas à cl D(A) ({self.kind})")
        if self.minimal_section_fn is not None:
            return self.minimal_section_fn(x)
        return self.yosida(MINIMAL_SECTION_LAMBDA, x)

    def yosida_jacobian(self, lam: float, x) -> Optional[np.ndarray]:
        """Dérivée généralisée de A_λ en x, ou None si indisponible"""
        if self.resolvent_derivative_fn is None:
            return None
        x = self._check(x)
        return (np.eye(self.dim) - self.resolvent_derivative_fn(lam, x)) / lam

    def support(self, zeta, tol: float = 0.0) -> float:
        """
        Fonction d'appui σ(ζ, cl D(A)) pour les cônes normaux

        Args:
            zeta: Direction
            tol: Tolérance relative sur l'appartenance de ζ au cône polaire
        """
        if self.support_fn is None:
            raise ValidationError(f"fonction d'appui indisponible pour '{self.kind}'")
        return float(self.support_fn(self._check(zeta), tol))


def resolvent(map: MonotoneMap, lam: float, x) -> np.ndarray:
    """J_λ(x) = (I + λA)⁻¹x"""
    return map.resolvent(lam, x)


def yosida(map: MonotoneMap, lam: float, x) -> np.ndarray:
    """A_λ(x) = (x − J_λ(x))/λ"""
    return map.yosida(lam, x)


def minimal_section(map: MonotoneMap, x) -> np.ndarray:
    """A⁰(x), élément de norme minimale de A(x)"""
    return map.minimal_section(x)


# ---------------------------------------------------------------------------
# Catalogue
# ---------------------------------------------------------------------------

def _identity(x: np.ndarray) -> np.ndarray:
    return np.array(x, dtype=float, copy=True)


def zero_map(dim: int) -> MonotoneMap:
    """A ≡ {0}"""
    return MonotoneMap(
        dim=dim,
        kind='zero',
        resolvent_fn=lambda lam, x: _identity(x),
        projection_fn=_identity,
        contains_fn=lambda x, v, tol: bool(np.linalg.norm(v) <= tol),
        minimal_section_fn=lambda x: np.zeros_like(x),
        resolvent_derivative_fn=lambda lam, x: np.eye(dim),
        full_domain=True,
        name='zero',
    )


def identity_map(dim: int, c: float = 1.0) -> MonotoneMap:
    """A(ζ) = {cζ}, c ≥ 0"""
    c = float(c)
    if c < 0:
        raise ValidationError(f"le facteur c doit être ≥ 0, reçu {c}", key='c')

    def contains(x, v, tol):
        return bool(np.linalg.norm(v - c * x) <= tol * max(1.0, c * np.linalg.norm(x)))

    return MonotoneMap(
        dim=dim,
        kind='identity-scaled',
        resolvent_fn=lambda lam, x: x / (1.0 + lam * c),
        projection_fn=_identity,
        contains_fn=contains,
        minimal_section_fn=lambda x: c * x,
        resolvent_derivative_fn=lambda lam, x: np.eye(dim) / (1.0 + lam * c),
        full_domain=True,
        name=f'identity(c={c:g})',
        params={'c': c},
    )


def prox_l1_map(dim: int, c: float = 1.0) -> MonotoneMap:
    """A = ∂(c‖·‖₁), résolvante = seuillage doux"""
    c = float(c)
    if c < 0:
        raise ValidationError(f"le poids c doit être ≥ 0, reçu {c}", key='c')

    def soft_threshold(lam, x):
        return np.sign(x) * np.maximum(np.abs(x) - lam * c, 0.0)

    def contains(x, v, tol):
        active = np.abs(x) > tol
        on_kink = np.abs(v[~active]) <= c + tol
        on_branch = np.abs(v[active] - c * np.sign(x[active])) <= tol
        return bool(np.all(on_kink) and np.all(on_branch))

    return MonotoneMap(
        dim=dim,
        kind='prox-of-convex',
        resolvent_fn=soft_threshold,
        projection_fn=_identity,
        contains_fn=contains,
        minimal_section_fn=lambda x: c * np.sign(x),
        resolvent_derivative_fn=lambda lam, x: np.diag((np.abs(x) > lam * c).astype(float)),
        full_domain=True,
        name=f'prox-l1(c={c:g})',
        params={'c': c},
    )


# ---------------------------------------------------------------------------
# Cônes normaux
# ---------------------------------------------------------------------------

CONE_KIND = {
    'orthant': 'orthant-cone',
    'box': 'box-cone',
    'singleton': 'point-cone',
    'ball': 'ball-cone',
    'halfspace': 'convex-set-cone',
    'polyhedron': 'convex-set-cone',
    'whole': 'convex-set-cone',
}

_ALIASES = {
    'nonnegative-orthant': 'orthant',
    'point': 'singleton',
    'half-space': 'halfspace',
    'whole-space': 'whole',
}


def _vector(value, dim: Optional[int], key: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if dim is not None and arr.shape == (1,) and dim > 1:
        arr = np.full(dim, arr[0])
    if arr.ndim != 1 or (dim is not None and arr.shape[0] != dim):
        raise ValidationError(f"'{key}' de forme {arr.shape}, dimension {dim} attendue", key=key)
    return arr


def normalize_set_descriptor(descriptor: Union[str, Dict[str, Any]], dim: Optional[int] = None) -> Dict[str, Any]:
    """
    Normalise un descripteur d'ensemble convexe

    Args:
        descriptor: 'orthant', 'whole' ou dictionnaire avec une clé 'type'
        dim: Dimension si le descripteur ne la fixe pas

    Returns:
        Dict: Descripteur complet (type, dim et paramètres en tableaux)
    """
    if isinstance(descriptor, str):
        descriptor = {'type': descriptor}
    if not isinstance(descriptor, dict) or 'type' not in descriptor:
        raise ValidationError(f"descripteur d'ensemble invalide: {descriptor!r}", key='set')
    kind = str(descriptor['type']).lower()
    kind = _ALIASES.get(kind, kind)
    if kind not in CONE_KIND:
        raise ValidationError(
            f"pas de projection exacte implémentée pour l'ensemble '{descriptor['type']}'", key='set'
        )
    dim = descriptor.get('dim', dim)
    out: Dict[str, Any] = {'type': kind}

    if kind == 'box':
        lower = np.atleast_1d(np.asarray(descriptor.get('lower', 0.0), dtype=float))
        upper = np.atleast_1d(np.asarray(descriptor.get('upper', 1.0), dtype=float))
        if dim is None:
            dim = max(lower.size, upper.size)
        lower, upper = _vector(lower, dim, 'lower'), _vector(upper, dim, 'upper')
        if np.any(lower > upper):
            raise ValidationError("boîte vide: lower > upper", key='set')
        out.update(lower=lower, upper=upper)
    elif kind == 'singleton':
        point = np.atleast_1d(np.asarray(descriptor.get('point', 0.0), dtype=float))
        if dim is None:
            dim = point.size
        out['point'] = _vector(point, dim, 'point')
    elif kind == 'ball':
        center = np.atleast_1d(np.asarray(descriptor.get('center', 0.0), dtype=float))
        if dim is None:
            dim = center.size
        radius = float(descriptor.get('radius', 1.0))
        if radius < 0:
            raise ValidationError(f"rayon négatif: {radius}", key='radius')
        out.update(center=_vector(center, dim, 'center'), radius=radius)
    elif kind == 'halfspace':
        normal = np.atleast_1d(np.asarray(descriptor['normal'], dtype=float))
        if dim is None:
            dim = normal.size
        normal = _vector(normal, dim, 'normal')
        if np.linalg.norm(normal) == 0:
            raise ValidationError("normale nulle pour un demi-espace", key='normal')
        out.update(normal=normal, offset=float(descriptor.get('offset', 0.0)))
    elif kind == 'polyhedron':
        normals = np.atleast_2d(np.asarray(descriptor['normals'], dtype=float))
        offsets = np.atleast_1d(np.asarray(descriptor.get('offsets', np.zeros(len(normals))), dtype=float))
        if dim is None:
            dim = normals.shape[1]
        if normals.shape[1] != dim or offsets.shape[0] != normals.shape[0]:
            raise ValidationError("normales/offsets de formes incompatibles", key='normals')
        norms = np.linalg.norm(normals, axis=1)
        if np.any(norms == 0):
            raise ValidationError("normale nulle dans le polyèdre", key='normals')
        gram = normals @ normals.T
        off_diag = gram - np.diag(np.diag(gram))
        if np.any(np.abs(off_diag) > 1e-12 * np.outer(norms, norms)):
            raise ValidationError(
                "pas de projection exacte implémentée: normales non orthogonales", key='normals'
            )
        out.update(normals=normals, offsets=offsets)

    if dim is None:
        raise ValidationError(f"dimension requise pour l'ensemble '{kind}'", key='dim')
    out['dim'] = int(dim)
    return out


def _set_projection(desc: Dict[str, Any]) -> Callable[[np.ndarray], np.ndarray]:
    kind = desc['type']
    if kind == 'orthant':
        return lambda x: np.maximum(x, 0.0)
    if kind == 'box':
        return lambda x: np.clip(x, desc['lower'], desc['upper'])
    if kind == 'singleton':
        return lambda x: np.broadcast_to(desc['point'], np.shape(x)).copy()
    if kind == 'whole':
        return _identity
    if kind == 'ball':
        center, radius = desc['center'], desc['radius']

        def project_ball(x):
            d = x - center
            rho = np.linalg.norm(d, axis=-1, keepdims=True)
            outside = rho > radius
            scale = np.where(outside, radius / np.where(outside, rho, 1.0), 1.0)
            return center + d * scale
        return project_ball
    if kind == 'halfspace':
        a, beta = desc['normal'], desc['offset']
        a_scaled = a / (a @ a)

        def project_halfspace(x):
            violation = np.maximum(x @ a - beta, 0.0)
            return x - violation[..., None] * a_scaled
        return project_halfspace
    # polyhedron à normales orthogonales : corrections indépendantes
    normals, offsets = desc['normals'], desc['offsets']
    scaled = normals / np.sum(normals ** 2, axis=1)[:, None]

    def project_polyhedron(x):
        violation = np.maximum(x @ normals.T - offsets, 0.0)
        return x - violation @ scaled
    return project_polyhedron


def _projection_derivative(desc: Dict[str, Any]) -> Callable[[float, np.ndarray], np.ndarray]:
    kind, dim = desc['type'], desc['dim']
    if kind == 'orthant':
        return lambda lam, x: np.diag((x >= 0.0).astype(float))
    if kind == 'box':
        return lambda lam, x: np.diag(((x >= desc['lower']) & (x <= desc['upper'])).astype(float))
    if kind == 'singleton':
        return lambda lam, x: np.zeros((dim, dim))
    if kind == 'whole':
        return lambda lam, x: np.eye(dim)
    if kind == 'ball':
        center, radius = desc['center'], desc['radius']

        def ball_derivative(lam, x):
            d = x - center
            rho = np.linalg.norm(d)
            if rho <= radius:
                return np.eye(dim)
            u = d / rho
            return (radius / rho) * (np.eye(dim) - np.outer(u, u))
        return ball_derivative
    if kind == 'halfspace':
        a, beta = desc['normal'], desc['offset']
        return lambda lam, x: (np.eye(dim) - np.outer(a, a) / (a @ a)) if x @ a > beta else np.eye(dim)
    normals, offsets = desc['normals'], desc['offsets']

    def polyhedron_derivative(lam, x):
        jac = np.eye(dim)
        for a, beta in zip(normals, offsets):
            if x @ a > beta:
                jac -= np.outer(a, a) / (a @ a)
        return jac
    return polyhedron_derivative


def _set_support(desc: Dict[str, Any]) -> Callable[[np.ndarray, float], float]:
    """
    σ(z, K) avec tolérance relative

    Les composantes de z hors du cône polaire de taille ≤ tol·max(1, ‖z‖) sont
    traitées comme nulles.
    """
    kind = desc['type']
    inf = float('inf')

    def slack(z, tol):
        return tol * max(1.0, float(np.linalg.norm(z)))

    def orthant(z, tol):
        return 0.0 if np.all(z <= slack(z, tol)) else inf

    def box(z, tol):
        terms = np.where(z > 0, z * desc['upper'], np.where(z < 0, z * desc['lower'], 0.0))
        return float(np.sum(terms))

    def whole(z, tol):
        return 0.0 if np.all(np.abs(z) <= slack(z, tol)) else inf

    def cone_of_normals(z, tol, normals, offsets):
        eps = max(slack(z, tol), 1e-12 * max(1.0, np.linalg.norm(z)))
        coeffs = (normals @ z) / np.sum(normals ** 2, axis=1)
        if np.any(coeffs < -eps):
            return inf
        if np.linalg.norm(z - coeffs @ normals) > eps:
            return inf
        return float(np.maximum(coeffs, 0.0) @ offsets)

    if kind == 'orthant':
        return orthant
    if kind == 'box':
        return box
    if kind == 'singleton':
        return lambda z, tol: float(z @ desc['point'])
    if kind == 'ball':
        return lambda z, tol: float(z @ desc['center'] + desc['radius'] * np.linalg.norm(z))
    if kind == 'whole':
        return whole
    if kind == 'halfspace':
        return lambda z, tol: cone_of_normals(z, tol, desc['normal'][None, :], np.array([desc['offset']]))
    return lambda z, tol: cone_of_normals(z, tol, desc['normals'], desc['offsets'])


def _cone_contains(project: Callable[[np.ndarray], np.ndarray]):
    def contains(x, v, tol):
        scale = max(1.0, np.linalg.norm(x))
        if np.linalg.norm(project(x) - x) > tol * scale:
            return False
        nv = np.linalg.norm(v)
        if nv == 0.0:
            return True
        # N_C(x) est un cône : on teste la direction de v
        s = 1.0 / max(1.0, nv)
        return bool(np.linalg.norm(project(x + s * v) - x) <= tol * scale)
    return contains


def make_normal_cone(set_descriptor: Union[str, Dict[str, Any]], dim: Optional[int] = None) -> MonotoneMap:
    """
    Construit le cône normal N_C d'un ensemble convexe fermé

    Args:
        set_descriptor: orthant, box, singleton, ball, halfspace,
            polyhedron (normales orthogonales) ou whole
        dim: Dimension si le descripteur ne la fixe pas

    Returns:
        MonotoneMap: Résolvante = projection métrique sur C
    """
    desc = normalize_set_descriptor(set_descriptor, dim)
    project = _set_projection(desc)
    zero = np.zeros(desc['dim'])

    def minimal(x):
        return np.zeros_like(x)

    return MonotoneMap(
        dim=desc['dim'],
        kind=CONE_KIND[desc['type']],
        resolvent_fn=lambda lam, x: project(x),
        projection_fn=project,
        contains_fn=_cone_contains(project),
        minimal_section_fn=minimal,
        resolvent_derivative_fn=_projection_derivative(desc),
        support_fn=_set_support(desc),
        full_domain=desc['type'] == 'whole',
        name=f"N[{desc['type']}]",
        params={'set': desc, 'contains_origin': bool(np.allclose(project(zero), zero))},
    )


# ---------------------------------------------------------------------------
# Opérateurs utilisateur
# ---------------------------------------------------------------------------

def custom_from_resolvent(
    dim: int,
    resolvent_fn: Callable[[float, np.ndarray], np.ndarray],
    projection_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    name: str = 'custom',
) -> MonotoneMap:
    """
    Opérateur fourni par sa résolvante (contrat utilisateur)

    La projection sur cl D(A) est approchée par J_λ avec λ = 1e-10 si elle
    n'est pas fournie.
    """
    def vectorized(lam, x):
        if x.ndim == 1:
            return np.asarray(resolvent_fn(lam, x), dtype=float)
        flat = x.reshape(-1, dim)
        return np.vstack([resolvent_fn(lam, row) for row in flat]).reshape(x.shape)

    project = projection_fn or (lambda x: vectorized(DOMAIN_PROJECTION_LAMBDA, x))

    def contains(x, v, tol):
        return bool(np.linalg.norm(vectorized(1.0, x + v) - x) <= tol * max(1.0, np.linalg.norm(x)))

    return MonotoneMap(
        dim=dim,
        kind='custom',
        resolvent_fn=vectorized,
        projection_fn=project,
        contains_fn=contains,
        name=name,
    )


def custom_from_function(
    dim: int,
    func: Callable[[np.ndarray], np.ndarray],
    name: str = 'custom',
    tol: float = 1e-12,
) -> MonotoneMap:
    """
    Opérateur univoque continu et monotone g : ℝᵈ → ℝᵈ

    La résolvante résout z + λ g(z) = x par scipy.optimize.root.
    """
    def solve_one(lam, x):
        sol = optimize.root(lambda z: z + lam * np.asarray(func(z), dtype=float) - x,
                            x0=np.array(x, dtype=float), method='hybr', tol=tol)
        if not sol.success or np.linalg.norm(sol.fun) > 1e-9 * (1.0 + np.linalg.norm(x)):
            logger.error(f"Résolvante de '{name}' non convergée en x={x.tolist()}: {sol.message}")
            raise NonConvergence(
                f"résolvante de '{name}' non convergée (λ={lam:g}): {sol.message}",
                best_iterate=sol.x,
                residual_history=[float(np.linalg.norm(sol.fun))],
                lam=lam,
            )
        return sol.x

    def vectorized(lam, x):
        if x.ndim == 1:
            return solve_one(lam, x)
        flat = x.reshape(-1, dim)
        return np.vstack([solve_one(lam, row) for row in flat]).reshape(x.shape)

    def contains(x, v, tol_):
        g = np.asarray(func(x), dtype=float)
        return bool(np.linalg.norm(v - g) <= tol_ * max(1.0, np.linalg.norm(g)))

    return MonotoneMap(
        dim=dim,
        kind='custom',
        resolvent_fn=vectorized,
        projection_fn=_identity,
        contains_fn=contains,
        minimal_section_fn=lambda x: np.asarray(func(x), dtype=float),
        full_domain=True,
        name=name,
    )


def make_monotone_map(kind: str, params: Optional[Dict[str, Any]] = None, dim: int = 1) -> MonotoneMap:
    """
    Fabrique un opérateur du catalogue à partir d'un nom et de paramètres

    Args:
        kind: zero, identity, prox-l1, normal-cone ou un alias de cône
            (orthant-cone, box-cone, point-cone, ball-cone, convex-set-cone)
        params: Paramètres (c, set...)
        dim: Dimension N

    Returns:
        MonotoneMap: Opérateur construit
    """
    params = dict(params or {})
    kind = kind.lower()
    if kind == 'zero':
        return zero_map(dim)
    if kind in ('identity', 'identity-scaled'):
        return identity_map(dim, params.get('c', 1.0))
    if kind in ('prox-l1', 'prox-of-convex'):
        return prox_l1_map(dim, params.get('c', 1.0))
    if kind == 'orthant-cone':
        return make_normal_cone('orthant', dim)
    if kind in ('normal-cone', 'box-cone', 'point-cone', 'ball-cone', 'convex-set-cone'):
        if 'set' not in params:
            raise ValidationError(f"l'opérateur '{kind}' requiert le paramètre 'set'", key='A.set')
        return make_normal_cone(params['set'], dim)
    raise ValidationError(f"type d'opérateur inconnu: {kind}", key='A')


# ---------------------------------------------------------------------------
# Hypothèses H(A)
# ---------------------------------------------------------------------------

def check_zero_in_image(A: MonotoneMap, lambdas: Sequence[float] = (1.0, 1e-3), tol: float = 1e-12) -> HypothesisReport:
    """
    Vérifie 0 ∈ A(0) via l'identité J_λ(0) = 0

    Returns:
        HypothesisReport: max_λ ‖J_λ(0)‖ et verdict
    """
    zero = np.zeros(A.dim)
    images = [A.resolvent(lam, zero) for lam in lambdas]
    norms = [float(np.linalg.norm(z)) for z in images]
    k = int(np.argmax(norms))
    worst, witness = norms[k], {'lambda': lambdas[k], 'J(0)': images[k]}
    catalog = A.kind != 'custom'
    return HypothesisReport(
        name='H(A): 0 ∈ A(0)',
        passed=worst <= tol,
        value=worst,
        witness=witness,
        sample_count=len(lambdas),
        evidence='closed-form' if catalog else 'resolvent-identity',
        by_construction=catalog and worst <= tol,
    )


def check_full_domain(A: MonotoneMap, samples: int = 64, seed: int = 0, radius: float = 10.0,
                      tol: float = 1e-8) -> HypothesisReport:
    """Vérifie D(A) = ℝᴺ par échantillonnage de la projection sur le domaine"""
    rng = np.random.default_rng(seed)
    points = rng.uniform(-radius, radius, size=(samples, A.dim))
    gaps = np.linalg.norm(A.domain_projection(points) - points, axis=1)
    k = int(np.argmax(gaps))
    value = float(gaps[k])
    return HypothesisReport(
        name='H(A): D(A) = ℝᴺ',
        passed=value <= tol * max(1.0, radius),
        value=value,
        witness={'point': points[k]},
        sample_count=samples,
        by_construction=A.full_domain,
        note='' if A.full_domain else SAMPLING_NOTE,
    )
