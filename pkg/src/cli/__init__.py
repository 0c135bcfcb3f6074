"""
Module CLI
Commandes solve, verify, study et catalog, écriture des tables et rapports
"""

from .commands import EXIT_CHECK_FAILED, EXIT_ERROR, EXIT_OK, run_catalog, run_solve, run_study, run_verify
from .output import read_solution_csv, write_report, write_solution_csv, write_study_csv

__all__ = [
    'EXIT_CHECK_FAILED', 'EXIT_ERROR', 'EXIT_OK',
    'run_catalog', 'run_solve', 'run_study', 'run_verify',
    'read_solution_csv', 'write_report', 'write_solution_csv', 'write_study_csv',
]
