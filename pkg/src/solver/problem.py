"""
Description d'un problème aux limites et paramètres du solveur
ProblemSpec, SolverConfig, SolveReport et verdicts de certificats
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..core.boundary import BoundaryOperator
from ..core.exceptions import InvalidProblem, ValidationError
from ..core.fields import MultiField
from ..core.grid import Exponent, Grid, TrajectoryGrid, as_exponent
from ..core.monotone import MonotoneMap
from ..core.reports import to_builtin

logger = logging.getLogger(__name__)

DEFAULT_LAMBDA_SCHEDULE = (1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)


@dataclass(frozen=True)
class ProblemSpec:
    """Instance de (φ(x′))′ ∈ A(x) + F(t, x), (φ(x′(0)), −φ(x′(T))) ∈ ξ(x(0), x(T))"""
    N: int
    p: Exponent
    T: float
    A: MonotoneMap
    F: MultiField
    xi: BoundaryOperator
    M: Optional[float] = None
    name: str = ''

    def __post_init__(self):
        object.__setattr__(self, 'p', as_exponent(self.p))
        if self.N < 1:
            raise ValidationError(f"N doit être ≥ 1, reçu {self.N}", key='N')
        if not self.T > 0:
            raise ValidationError(f"T doit être > 0, reçu {self.T}", key='T')
        if self.M is not None and not self.M > 0:
            raise ValidationError(f"M doit être > 0, reçu {self.M}", key='M')
        for label, dim in (('A', self.A.dim), ('F', self.F.dim), ('ξ', self.xi.dim)):
            if dim != self.N:
                raise InvalidProblem(f"dimension de {label} ({dim}) différente de N = {self.N}")
        if self.A.kind != 'zero':
            zero = np.zeros(self.N)
            if np.linalg.norm(self.A.resolvent(1.0, zero)) > 1e-12:
                raise InvalidProblem(f"0 ∉ A(0) pour l'opérateur '{self.A.name}'")

    @property
    def variant(self) -> str:
        """Cadre d'existence applicable : convexe, domaine plein ou non convexe"""
        if not self.F.convex_valued:
            return 'nonconvex'
        return 'full-domain' if self.A.full_domain else 'convex'

    def grid(self, n: int) -> Grid:
        return Grid(self.T, n)


@dataclass(frozen=True)
class SolverConfig:
    """Paramètres de discrétisation, de continuation et de Newton"""
    n: int = 64
    lambda_schedule: Tuple[float, ...] = DEFAULT_LAMBDA_SCHEDULE
    epsilon_schedule: Optional[Tuple[float, ...]] = None
    newton_max_iters: int = 50
    newton_tol: float = 1e-10
    damping: float = 0.5
    min_step: float = 2.0 ** -20
    picard_fallback_iters: int = 200
    mu: float = 1.0
    tol_hartman: float = 1e-9
    hartman_slack: float = 10.0

    def __post_init__(self):
        object.__setattr__(self, 'lambda_schedule', tuple(float(v) for v in self.lambda_schedule))
        if self.epsilon_schedule is not None:
            object.__setattr__(self, 'epsilon_schedule', tuple(float(v) for v in self.epsilon_schedule))
        if int(self.n) != self.n or self.n < 2:
            raise ValidationError(f"n doit être un entier ≥ 2, reçu {self.n}", key='solver.n')
        schedule = self.lambda_schedule
        if not schedule:
            raise ValidationError("le calendrier λ est vide", key='solver.lambda_schedule')
        if any(not lam > 0 for lam in schedule) or any(b >= a for a, b in zip(schedule, schedule[1:])):
            raise ValidationError("le calendrier λ doit être positif et strictement décroissant",
                                  key='solver.lambda_schedule')
        if self.epsilon_schedule is not None:
            eps = self.epsilon_schedule
            if len(eps) != len(schedule) or any(not e > 0 for e in eps):
                raise ValidationError("epsilon_schedule: une valeur > 0 par λ", key='solver.epsilon_schedule')
        for key in ('newton_tol', 'min_step', 'mu', 'tol_hartman'):
            if not getattr(self, key) > 0:
                raise ValidationError(f"{key} doit être > 0", key=f'solver.{key}')
        if not 0 < self.damping < 1:
            raise ValidationError("damping doit être dans ]0, 1[", key='solver.damping')
        if self.newton_max_iters < 1 or self.picard_fallback_iters < 0:
            raise ValidationError("budgets d'itérations invalides", key='solver.newton_max_iters')

    def epsilon_for(self, index: int, h: float) -> float:
        """ε du lissage jacobien pour le k-ième λ (défaut √λ·h)"""
        if self.epsilon_schedule is not None:
            return self.epsilon_schedule[index]
        return float(np.sqrt(self.lambda_schedule[index]) * h)

    def with_grid(self, n: int) -> 'SolverConfig':
        return replace(self, n=n)


@dataclass
class ContinuationStep:
    """Bilan d'une étape λ de la continuation"""
    lam: float
    epsilon: float
    iterations: int
    residual: float
    step_diff: float
    used_fallback: bool = False
    complementarity: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return to_builtin(self.__dict__)


@dataclass
class Verdict:
    """Certificat a posteriori : mesure, borne, marge et témoin"""
    name: str
    passed: bool
    measured: float
    bound: float
    witness: Optional[Dict[str, Any]] = None
    note: str = ''

    @property
    def slack(self) -> float:
        return float(self.bound - self.measured)

    def to_dict(self) -> Dict[str, Any]:
        return to_builtin({
            'name': self.name, 'passed': self.passed, 'measured': self.measured,
            'bound': self.bound, 'slack': self.slack, 'witness': self.witness, 'note': self.note,
        })


@dataclass
class SolveReport:
    """Trajectoire convergée, traces et diagnostics d'une résolution"""
    trajectory: TrajectoryGrid
    flux: np.ndarray
    selection_trace: np.ndarray
    multiplier_trace: np.ndarray
    residual_norm: float
    bc_residual_norm: float
    hartman_max_norm: float
    graph_membership_residual: float
    lam: float
    epsilon: float
    tolerance: float
    iterations: int = 0
    residual_history: List[float] = field(default_factory=list)
    used_fallback: bool = False
    continuation_history: List[ContinuationStep] = field(default_factory=list)
    verdicts: Dict[str, Verdict] = field(default_factory=dict)
    variant: str = 'convex'

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts.values())

    def summary(self) -> Dict[str, Any]:
        """Scalaires, verdicts et historique sous forme sérialisable"""
        return to_builtin({
            'n': self.trajectory.grid.n,
            'T': self.trajectory.grid.T,
            'N': self.trajectory.dim,
            'variant': self.variant,
            'lambda_final': self.lam,
            'epsilon_final': self.epsilon,
            'tolerance': self.tolerance,
            'iterations': self.iterations,
            'used_fallback': self.used_fallback,
            'residual_norm': self.residual_norm,
            'bc_residual_norm': self.bc_residual_norm,
            'hartman_max_norm': self.hartman_max_norm,
            'graph_membership_residual': self.graph_membership_residual,
            'continuation_history': [step.to_dict() for step in self.continuation_history],
            'verdicts': {name: v.to_dict() for name, v in self.verdicts.items()},
            'passed': self.passed,
        })
