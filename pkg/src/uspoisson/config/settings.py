"""Settings management for uspoisson.

Handles loading and merging solver defaults from multiple sources. Problem
files override these per run.
"""
# Created: 2026-10-18

import logging
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

logger = logging.getLogger(__name__)

SECTIONS = ('solver', 'output', 'benchmark', 'logging')


@dataclass
class SolverSettings:
    """Defaults for the ADI driver."""
    tolerance: float = 1e-12
    check_every: int = 10
    max_n: int = 1024
    initial_n: int = 16
    method: str = "adi"
    empirical_safety: float = 1.1  # inflation of measured spectra
    empirical_iters: int = 500
    rho_samples: int = 257
    rho_inflation: float = 0.05
    aca_tolerance: float = 1e-15


@dataclass
class OutputSettings:
    """Where and how results are written."""
    directory: str = "out"
    grid_size: int = 101
    coefficients: str = "coefficients.csv"
    grid: str = "grid.csv"
    report: str = "report.json"
    benchmark: str = "benchmark.csv"


@dataclass
class BenchmarkSettings:
    """Sizes and tolerances swept by --benchmark."""
    sizes: list = field(default_factory=lambda: [256, 512, 1024, 2048])
    tolerances: list = field(default_factory=lambda: [1e-12])


@dataclass
class LoggingSettings:
    level: str = "INFO"


@dataclass
class Settings:
    """Main settings container."""
    solver: SolverSettings = field(default_factory=SolverSettings)
    output: OutputSettings = field(default_factory=OutputSettings)
    benchmark: BenchmarkSettings = field(default_factory=BenchmarkSettings)
    logging: LoggingSettings = field(default_factory=LoggingSettings)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Settings':
        """Create Settings from dictionary; unknown keys are ignored with a warning."""
        settings = cls()
        for section in SECTIONS:
            values = data.get(section)
            if not isinstance(values, dict):
                continue
            target = getattr(settings, section)
            for key, value in values.items():
                if hasattr(target, key):
                    setattr(target, key, _coerce(getattr(target, key), value))
                else:
                    logger.warning(f"Ignoring unknown setting {section}.{key}")
        return settings

    def merge(self, other: 'Settings') -> None:
        """Merge another Settings object into this one (non-default values win)."""
        for section in SECTIONS:
            self_section = getattr(self, section)
            other_section = getattr(other, section)
            defaults = type(other_section)()
            for f in fields(other_section):
                value = getattr(other_section, f.name)
                if value is not None and value != getattr(defaults, f.name):
                    setattr(self_section, f.name, value)

    def to_dict(self) -> Dict[str, Any]:
        return {section: dict(vars(getattr(self, section))) for section in SECTIONS}


def default_config_dir() -> Path:
    return Path.home() / ".config" / "uspoisson"


def load_settings(config_dir: Optional[Path] = None) -> Settings:
    """Load settings from configuration files.

    Loads from multiple sources in order of precedence:
    1. Default settings (config/default_config.yaml, else built-in)
    2. User config file
    3. Environment variables (USPOISSON_TOLERANCE, USPOISSON_MAX_N)

    Args:
        config_dir: Optional config directory override

    Returns:
        Merged Settings object
    """
    settings = Settings()

    if config_dir is None:
        config_dir = default_config_dir()

    default_config_path = Path(__file__).parent.parent.parent.parent / "config" / "default_config.yaml"
    if default_config_path.exists():
        try:
            with open(default_config_path) as f:
                data = yaml.safe_load(f)
                if data:
                    settings = Settings.from_dict(data)
        except Exception as e:
            logger.warning(f"Failed to load default config: {e}")

    user_config_path = Path(config_dir) / "config.yaml"
    if user_config_path.exists():
        try:
            with open(user_config_path) as f:
                data = yaml.safe_load(f)
                if data:
                    settings.merge(Settings.from_dict(data))
        except Exception as e:
            logger.warning(f"Failed to load user config: {e}")

    if tolerance := os.environ.get('USPOISSON_TOLERANCE'):
        try:
            settings.solver.tolerance = float(tolerance)
        except ValueError:
            logger.warning(f"Ignoring USPOISSON_TOLERANCE={tolerance!r}: not a number")

    if max_n := os.environ.get('USPOISSON_MAX_N'):
        try:
            settings.solver.max_n = int(max_n)
        except ValueError:
            logger.warning(f"Ignoring USPOISSON_MAX_N={max_n!r}: not an integer")

    return settings


def save_settings(settings: Settings, config_dir: Optional[Path] = None) -> Path:
    """Save settings to the user config file and return its path."""
    if config_dir is None:
        config_dir = default_config_dir()
    config_dir = Path(config_dir)
    config_dir.mkdir(parents=True, exist_ok=True)

    config_path = config_dir / "config.yaml"
    with open(config_path, 'w') as f:
        yaml.dump(settings.to_dict(), f, default_flow_style=False, sort_keys=False)
    return config_path


def _coerce(current: Any, value: Any) -> Any:
    # YAML reads 1e-12 as a string
    if isinstance(current, float) and isinstance(value, (str, int)) and not isinstance(value, bool):
        try:
            return float(value)
        except ValueError:
            return value
    return value
