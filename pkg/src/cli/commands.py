"""
Commandes de la ligne de commande
solve, verify, study et catalog, avec codes de sortie 0 (succès), 2 (vérification en échec), 1 (erreur)
"""

import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from ..config.catalog import build_components, build_problem, list_catalog
from ..config.config_manager import RunConfig
from ..core.exceptions import NonConvergence, PlapError, ValidationError
from ..plugins.plugin_manager import PluginManager
from ..solver.certificates import check_hypotheses
from ..solver.continuation import continuation_solve
from ..solver.obstacle import obstacle_reference
from ..solver.problem import ProblemSpec, SolveReport
from ..solver.study import convergence_study, reference_function
from .output import write_report, write_solution_csv, write_study_csv

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CHECK_FAILED = 2


def _output_path(output_dir: str, name: str) -> Path:
    path = Path(name)
    return path if path.is_absolute() else Path(output_dir) / path


def _echo(message: str, quiet: bool):
    if not quiet:
        print(message)


def _fail(message: str) -> int:
    print(f"❌ {message}", file=sys.stderr)
    return EXIT_ERROR


def _problem_header(spec: ProblemSpec) -> Dict[str, Any]:
    return {
        'name': spec.name, 'N': spec.N, 'p': spec.p.p, 'T': spec.T, 'M': spec.M,
        'A': spec.A.name, 'F': spec.F.name, 'xi': spec.xi.name, 'variant': spec.variant,
    }


def _obstacle_comparison(spec: ProblemSpec, report: SolveReport) -> Optional[Dict[str, Any]]:
    """Écart à l'oracle PSOR lorsque le problème est un obstacle scalaire à extrémités nulles"""
    try:
        reference = obstacle_reference(spec, report.trajectory.grid.n)
    except ValidationError:
        return None
    gap = float(np.max(np.abs(report.trajectory.values - reference)))
    return {'max_abs_difference': gap}


def run_solve(cfg: RunConfig, output_dir: str = '.', quiet: bool = False,
              plugins: Optional[PluginManager] = None) -> int:
    """
    Résout une configuration et écrit la table de solution et le rapport

    Returns:
        int: 0 si tous les certificats passent, 2 si l'un échoue, 1 sur erreur
    """
    report_path = _output_path(output_dir, cfg.outputs.report)
    try:
        spec, config = build_problem(cfg, plugins)
        report = continuation_solve(spec, config)
    except NonConvergence as e:
        logger.error(f"Résolution non convergée: {e}")
        write_report({'status': 'non-convergence', 'error': e.to_dict()}, report_path)
        return _fail(f"Non-convergence: {e}")
    except PlapError as e:
        return _fail(str(e))

    write_solution_csv(report, _output_path(output_dir, cfg.outputs.solution))
    data = {'status': 'converged', 'problem': _problem_header(spec), **report.summary()}
    oracle = _obstacle_comparison(spec, report)
    if oracle is not None:
        data['obstacle_oracle'] = oracle
    write_report(data, report_path)

    _echo(f"📊 {spec.name}: n={config.n}, λ={report.lam:g}, ‖r‖∞={report.residual_norm:.3e}, "
          f"max‖x‖={report.hartman_max_norm:.6g}", quiet)
    for name, verdict in report.verdicts.items():
        _echo(f"   {'✅' if verdict.passed else '❌'} {name}: {verdict.measured:.3e} ≤ {verdict.bound:.3e}", quiet)

    if not report.passed:
        failed = [name for name, v in report.verdicts.items() if not v.passed]
        print(f"⚠️ Certificats en échec: {', '.join(failed)}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def run_verify(cfg: RunConfig, output_dir: str = '.', quiet: bool = False, seed: int = 0,
               plugins: Optional[PluginManager] = None) -> int:
    """
    Vérifie les hypothèses sans résoudre

    Returns:
        int: 0 si aucune hypothèse n'échoue, 2 sinon, 1 sur erreur
    """
    try:
        parts = build_components(cfg, plugins)
        reports = check_hypotheses(parts.A, parts.F, parts.xi, parts.T, M=parts.M, seed=seed)
    except PlapError as e:
        return _fail(str(e))

    failed = [r.name for r in reports if r.passed is False and r.extra.get('required', True)]
    write_report({
        'status': 'verified',
        'problem': {'name': parts.name, 'N': parts.N, 'p': parts.p, 'T': parts.T, 'M': parts.M},
        'seed': seed,
        'hypotheses': [r.to_dict() for r in reports],
        'passed': not failed,
    }, _output_path(output_dir, cfg.outputs.report))

    for r in reports:
        mark = '✅' if r.passed else ('❌' if r.passed is False else '⚠️')
        _echo(f"   {mark} {r.name} ({r.evidence})", quiet)
    if failed:
        print(f"⚠️ Hypothèses en échec: {', '.join(failed)}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def run_study(cfg: RunConfig, output_dir: str = '.', quiet: bool = False,
              plugins: Optional[PluginManager] = None) -> int:
    """
    Étude de convergence sur les grilles de [outputs] study_grids

    Returns:
        int: 0 si l'étude aboutit, 1 sur erreur
    """
    try:
        if not cfg.outputs.study_grids:
            raise ValidationError("grilles d'étude absentes", key='outputs.study_grids')
        spec, config = build_problem(cfg, plugins)
        name = cfg.outputs.reference or build_components(cfg, plugins).reference
        if name is None:
            raise ValidationError("aucune solution de référence pour ce problème", key='outputs.reference')
        table = convergence_study(spec, cfg.outputs.study_grids, config, reference_function(name, spec.N, spec.T))
    except NonConvergence as e:
        logger.error(f"Étude interrompue: {e}")
        return _fail(f"Non-convergence: {e}")
    except PlapError as e:
        return _fail(str(e))

    write_study_csv(table, _output_path(output_dir, cfg.outputs.study_table))
    write_report({'status': 'study', 'problem': _problem_header(spec), 'reference': name,
                  'rows': table.rows()}, _output_path(output_dir, cfg.outputs.report))
    _echo(table.format_table(f"Étude de convergence ({spec.name}, p={spec.p.p:g})"), quiet)
    return EXIT_OK


def run_catalog() -> int:
    """Affiche les exemples du catalogue et leurs schémas de paramètres (JSON)"""
    entries: List[Dict[str, Any]] = list(list_catalog().values())
    print(json.dumps(entries, indent=2, ensure_ascii=False))
    return EXIT_OK
