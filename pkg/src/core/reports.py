"""
Rapports de vérification d'hypothèses
Résultat commun des vérificateurs par échantillonnage (H(A), H(F), H(ξ), H₀)
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

SAMPLING_NOTE = "évidence par échantillonnage, pas une preuve"


def to_builtin(value: Any) -> Any:
    """Convertit récursivement les objets numpy en types JSON/YAML natifs"""
    if isinstance(value, np.ndarray):
        return [to_builtin(v) for v in value.tolist()]
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, dict):
        return {str(k): to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_builtin(v) for v in value]
    return value


@dataclass
class HypothesisReport:
    """Verdict d'une hypothèse avec témoin"""
    name: str
    passed: Optional[bool]
    value: float = 0.0
    witness: Optional[Dict[str, Any]] = None
    sample_count: int = 0
    evidence: str = 'sampling'
    by_construction: bool = False
    note: str = ''
    extra: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return to_builtin({
            'name': self.name,
            'passed': self.passed,
            'value': self.value,
            'witness': self.witness,
            'sample_count': self.sample_count,
            'evidence': self.evidence,
            'by_construction': self.by_construction,
            'note': self.note,
            **self.extra,
        })
