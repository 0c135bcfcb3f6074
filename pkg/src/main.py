#!/usr/bin/env python3
"""
Point d'entrée principal du solveur p-Laplacien
Interface en ligne de commande : solve, verify, study, catalog
"""

import argparse
import logging
import os
import sys
from typing import List, Optional

from dotenv import load_dotenv

from src.cli.commands import EXIT_ERROR, run_catalog, run_solve, run_study, run_verify
from src.config.config_manager import ConfigurationManager
from src.core.exceptions import PlapError
from src.plugins.plugin_manager import PluginManager


def build_parser() -> argparse.ArgumentParser:
    """Construit l'analyseur d'arguments"""
    parser = argparse.ArgumentParser(
        prog='plap',
        description="Inclusions p-Laplaciennes vectorielles avec conditions aux limites multivoques",
    )
    sub = parser.add_subparsers(dest='command', required=True)

    for verb, help_text in (('solve', "résout et écrit la table de solution et le rapport"),
                            ('verify', "vérifie les hypothèses sans résoudre"),
                            ('study', "étude de convergence en maillage")):
        cmd = sub.add_parser(verb, help=help_text)
        cmd.add_argument('config', help="fichier de configuration (.cfg, .json, .yaml)")
        cmd.add_argument('--output-dir', default=os.getenv('PLAP_OUTPUT_DIR', '.'),
                         help="répertoire des fichiers produits")
        cmd.add_argument('--quiet', action='store_true', help="n'affiche que les erreurs")
        cmd.add_argument('--seed', type=int, default=int(os.getenv('PLAP_SEED', '0')),
                         help="graine des vérificateurs par échantillonnage")
        cmd.add_argument('--override', action='append', default=[], metavar='CLÉ=VALEUR',
                         help="surcharge par chemin pointé (ex. solver.n=128), répétable")

    sub.add_parser('catalog', help="liste les exemples et leurs schémas de paramètres")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Fonction principale ; renvoie le code de sortie"""
    load_dotenv()
    args = build_parser().parse_args(argv)

    quiet = getattr(args, 'quiet', False)
    level = logging.WARNING if quiet else os.getenv('PLAP_LOG_LEVEL', 'INFO').upper()
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s')

    if args.command == 'catalog':
        return run_catalog()

    try:
        cfg = ConfigurationManager().import_configuration(args.config, overrides=args.override)
    except (PlapError, OSError, ValueError) as e:
        print(f"❌ Configuration invalide: {e}", file=sys.stderr)
        return EXIT_ERROR

    plugins = None
    if os.path.isdir(os.getenv('PLAP_PLUGINS_DIR', './plugins')):
        plugins = PluginManager(os.getenv('PLAP_PLUGINS_DIR', './plugins'), autoload=False)

    if args.command == 'solve':
        return run_solve(cfg, args.output_dir, quiet, plugins)
    if args.command == 'verify':
        return run_verify(cfg, args.output_dir, quiet, args.seed, plugins)
    return run_study(cfg, args.output_dir, quiet, plugins)


if __name__ == "__main__":
    sys.exit(main())
