"""
Écriture des tables et rapports
CSV à virgule décimale '.', flottants en représentation exacte la plus courte, rapports JSON ou YAML
"""

import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Sequence

import numpy as np
import yaml

from ..core.reports import to_builtin
from ..solver.problem import SolveReport
from ..solver.study import StudyTable

logger = logging.getLogger(__name__)


def format_float(value: float) -> str:
    return repr(float(value))


def solution_header(dim: int) -> List[str]:
    columns = ['t']
    for prefix in ('x', 'flux', 'u', 'f'):
        columns += [f'{prefix}_{k}' for k in range(1, dim + 1)]
    return columns


def solution_rows(report: SolveReport) -> List[List[str]]:
    """
    Lignes t, x, φ(d_{i−1/2}), u, f par nœud

    Le flux du nœud 0 est φ(d_{1/2}).
    """
    traj = report.trajectory
    flux = np.vstack([report.flux[:1], report.flux])
    rows = []
    for i, t in enumerate(traj.times):
        values = np.concatenate([traj.values[i], flux[i], report.multiplier_trace[i], report.selection_trace[i]])
        rows.append([format_float(t)] + [format_float(v) for v in values])
    return rows


def write_solution_csv(report: SolveReport, path: Path) -> Path:
    """Écrit la table de solution (n+1 lignes plus l'en-tête)"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(solution_header(report.trajectory.dim))
        writer.writerows(solution_rows(report))
    logger.info(f"Table de solution écrite: {path}")
    return path


def write_study_csv(table: StudyTable, path: Path) -> Path:
    """Écrit la table erreur/ordre d'une étude de convergence"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(['n', 'h', 'error', 'order'])
        for row in table.rows():
            order = '' if row['order'] is None else format_float(row['order'])
            writer.writerow([row['n'], format_float(row['h']), format_float(row['error']), order])
    logger.info(f"Table d'étude écrite: {path}")
    return path


def write_report(data: Dict[str, Any], path: Path) -> Path:
    """Écrit un rapport structuré ; YAML si l'extension est .yaml/.yml, JSON sinon"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = to_builtin(data)
    with open(path, 'w', encoding='utf-8') as f:
        if path.suffix.lower() in ('.yaml', '.yml'):
            yaml.safe_dump(data, f, default_flow_style=False, allow_unicode=True, sort_keys=False)
        else:
            json.dump(data, f, indent=2, ensure_ascii=False)
    logger.info(f"Rapport écrit: {path}")
    return path


def read_solution_csv(path: Path) -> Dict[str, Sequence[float]]:
    """Relit une table de solution en colonnes de flottants"""
    with open(path, 'r', encoding='utf-8', newline='') as f:
        reader = csv.DictReader(f)
        columns: Dict[str, List[float]] = {name: [] for name in reader.fieldnames or []}
        for row in reader:
            for name, value in row.items():
                columns[name].append(float(value))
    return columns
