"""
Gestionnaire de Plug-ins Dynamiques
Charge à chaud des modules Python fournissant champs, opérateurs et conditions aux limites
"""

import importlib.util
import logging
import os
import sys
from typing import Any, Callable, Dict, List, Optional

import yaml

from ..core.exceptions import ValidationError

logger = logging.getLogger(__name__)


class PluginManager:
    """
    Gestionnaire de plug-ins pour charger dynamiquement des fabriques utilisateur

    Une fabrique est appelée comme factory(dim=N, T=T, p=p, **params) et renvoie
    un MultiField, un MonotoneMap ou un BoundaryOperator.
    """

    def __init__(self, plugins_directory: str = "./plugins", autoload: bool = True):
        """
        Initialise le gestionnaire de plug-ins

        Args:
            plugins_directory: Répertoire contenant les plug-ins
            autoload: Découvre et charge les plug-ins immédiatement
        """
        self.plugins_directory = plugins_directory
        self.loaded_plugins: Dict[str, Dict[str, Any]] = {}
        self.logger = logging.getLogger(__name__)

        if not os.path.isdir(plugins_directory):
            self.logger.warning(f"⚠️ Répertoire des plug-ins absent: {plugins_directory}")
        elif autoload:
            self.discover_and_load_plugins()

    def discover_and_load_plugins(self) -> List[str]:
        """
        Découvre et charge tous les plug-ins disponibles

        Returns:
            List[str]: Liste des noms de plug-ins chargés
        """
        loaded = []

        if not os.path.isdir(self.plugins_directory):
            return loaded

        for item in sorted(os.listdir(self.plugins_directory)):
            item_path = os.path.join(self.plugins_directory, item)

            if os.path.isdir(item_path):
                if os.path.exists(os.path.join(item_path, "plugin_config.yaml")):
                    if self.load_plugin_from_directory(item, item_path):
                        loaded.append(item)

            elif item.endswith('.py') and not item.startswith('__'):
                plugin_name = item[:-3]
                if self.load_plugin_from_file(plugin_name, item_path):
                    loaded.append(plugin_name)

        self.logger.info(f"🔌 {len(loaded)} plug-ins découverts et chargés: {loaded}")
        return loaded

    def _import(self, plugin_name: str, path: str):
        spec = importlib.util.spec_from_file_location(f"plugins.{plugin_name}", path)
        module = importlib.util.module_from_spec(spec)
        spec.loader.exec_module(module)
        return module

    def load_plugin_from_directory(self, plugin_name: str, plugin_path: str) -> bool:
        """
        Charge un plug-in depuis un répertoire (main.py + plugin_config.yaml)

        Returns:
            bool: True si succès
        """
        try:
            config_file = os.path.join(plugin_path, "plugin_config.yaml")
            main_file = os.path.join(plugin_path, "main.py")

            if not os.path.exists(config_file) or not os.path.exists(main_file):
                self.logger.warning(f"⚠️ Plug-in '{plugin_name}' incomplet (plugin_config.yaml ou main.py manquant)")
                return False

            with open(config_file, 'r', encoding='utf-8') as f:
                config = yaml.safe_load(f) or {}

            self.loaded_plugins[plugin_name] = {
                'module': self._import(plugin_name, main_file),
                'config': config,
                'path': plugin_path,
            }
            self.logger.info(f"✅ Plug-in '{plugin_name}' chargé depuis le répertoire")
            return True

        except Exception as e:
            self.logger.error(f"❌ Erreur lors du chargement du plug-in '{plugin_name}': {e}")
            return False

    def load_plugin_from_file(self, plugin_name: str, plugin_path: str) -> bool:
        """
        Charge un plug-in depuis un fichier Python

        Returns:
            bool: True si succès
        """
        try:
            module = self._import(plugin_name, plugin_path)
            config = {
                'name': plugin_name,
                'version': '1.0.0',
                'description': f'Plug-in {plugin_name}',
                'factories': [],
            }
            if hasattr(module, 'PLUGIN_CONFIG'):
                config.update(module.PLUGIN_CONFIG)

            self.loaded_plugins[plugin_name] = {
                'module': module,
                'config': config,
                'path': plugin_path,
            }
            self.logger.info(f"✅ Plug-in '{plugin_name}' chargé depuis le fichier")
            return True

        except Exception as e:
            self.logger.error(f"❌ Erreur lors du chargement du plug-in '{plugin_name}': {e}")
            return False

    def get_plugin(self, plugin_name: str) -> Optional[Dict]:
        return self.loaded_plugins.get(plugin_name)

    def list_plugins(self) -> List[Dict]:
        """Liste les plug-ins chargés avec leur configuration"""
        return [{'name': name, 'config': data['config'], 'path': data['path']}
                for name, data in self.loaded_plugins.items()]

    def resolve(self, reference: str) -> Callable[..., Any]:
        """
        Résout une référence 'module.attr' en fabrique

        Args:
            reference: Nom du plug-in et de l'attribut séparés par un point

        Returns:
            Callable: Fabrique exportée par le plug-in

        Raises:
            ValidationError: Plug-in ou attribut introuvable
        """
        plugin_name, sep, attr = reference.partition('.')
        if not sep or not attr:
            raise ValidationError(f"référence de plug-in invalide '{reference}' (attendu module.attr)", key='plugin')

        plugin = self.get_plugin(plugin_name)
        if plugin is None:
            candidate = os.path.join(self.plugins_directory, f"{plugin_name}.py")
            if os.path.exists(candidate):
                self.load_plugin_from_file(plugin_name, candidate)
            elif os.path.isdir(os.path.join(self.plugins_directory, plugin_name)):
                self.load_plugin_from_directory(plugin_name, os.path.join(self.plugins_directory, plugin_name))
            plugin = self.get_plugin(plugin_name)
        if plugin is None:
            raise ValidationError(f"Plug-in '{plugin_name}' non trouvé dans {self.plugins_directory}", key='plugin')

        target: Any = plugin['module']
        for part in attr.split('.'):
            if not hasattr(target, part):
                raise ValidationError(f"Attribut '{attr}' non trouvé dans le plug-in '{plugin_name}'", key='plugin')
            target = getattr(target, part)
        if not callable(target):
            raise ValidationError(f"'{reference}' n'est pas une fabrique appelable", key='plugin')
        return target

    def build(self, reference: str, **kwargs) -> Any:
        """Résout puis appelle une fabrique avec dim, T, p et ses paramètres"""
        factory = self.resolve(reference)
        self.logger.debug(f"Fabrique '{reference}' appelée avec {sorted(kwargs)}")
        return factory(**kwargs)

    def unload_plugin(self, plugin_name: str) -> bool:
        """
        Décharge un plug-in

        Returns:
            bool: True si succès
        """
        if plugin_name not in self.loaded_plugins:
            return False
        sys.modules.pop(f"plugins.{plugin_name}", None)
        del self.loaded_plugins[plugin_name]
        self.logger.info(f"✅ Plug-in '{plugin_name}' déchargé")
        return True
