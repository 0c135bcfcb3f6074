#!/usr/bin/env python3
"""
Démonstration du catalogue
Résout les six exemples types et affiche verdicts et indicateurs principaux
"""

import logging
import os
import sys

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from dotenv import load_dotenv

from src.config.catalog import CATALOG, build_problem
from src.config.config_manager import ConfigurationManager
from src.core.exceptions import PlapError
from src.solver.continuation import continuation_solve
from src.solver.obstacle import obstacle_reference

CONFIGS_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), '..', 'configs')


def print_section(title: str):
    print(f"\n📋 {title}")
    print("-" * 50)


def run_example(manager: ConfigurationManager, name: str) -> bool:
    """Résout un exemple du catalogue et affiche son rapport"""
    print_section(f"{name}: {CATALOG[name]['description']}")
    try:
        cfg = manager.import_configuration(os.path.join(CONFIGS_DIR, f'{name}.cfg'))
        spec, config = build_problem(cfg)
        report = continuation_solve(spec, config)
    except PlapError as e:
        print(f"❌ {name}: {e}")
        return False

    print(f"📊 n={config.n}, variante={spec.variant}, λ={report.lam:g}, "
          f"‖r‖∞={report.residual_norm:.3e}, max‖x‖={report.hartman_max_norm:.6g}")
    for verdict_name, verdict in report.verdicts.items():
        mark = '✅' if verdict.passed else '❌'
        print(f"   {mark} {verdict_name}: {verdict.measured:.3e} ≤ {verdict.bound:.3e}")

    if name == 'example2':
        reference = obstacle_reference(spec, config.n)
        gap = abs(report.trajectory.values - reference).max()
        print(f"   🔍 écart à l'oracle PSOR: {gap:.3e}")
    return report.passed


def main() -> int:
    load_dotenv()
    logging.basicConfig(level=os.getenv('PLAP_LOG_LEVEL', 'WARNING').upper())

    print("🧮 Démonstration du catalogue p-Laplacien")
    print("=" * 50)

    manager = ConfigurationManager(CONFIGS_DIR)
    results = {name: run_example(manager, name) for name in sorted(CATALOG)}

    print_section("Résumé")
    for name, passed in results.items():
        print(f"   {'✅' if passed else '⚠️'} {name}")
    return 0 if all(results.values()) else 2


if __name__ == "__main__":
    sys.exit(main())
