"""Configuration management for uspoisson."""
# Created: 2026-10-18

from .settings import Settings, load_settings, save_settings

__all__ = ['Settings', 'load_settings', 'save_settings']
