"""
Module Plugins
Gère le système de plugins et leur chargement dynamique
"""

from .plugin_manager import PluginManager

__all__ = ['PluginManager'] 