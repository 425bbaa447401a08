"""Result files for uspoisson.

Writes coefficients, grid values, the run report and benchmark sweeps.
"""
# Created: 2026-10-18

import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from .chebfun import Cheb2D, evaluate_grid
from .config.settings import OutputSettings
from .errors import ConfigError

logger = logging.getLogger(__name__)

GRID_HEADER = ("x", "y", "u")
BENCHMARK_FIELDS = ("n", "tolerance", "wall_time", "iterations", "shifts")


def format_float(value: float) -> str:
    """17 significant digits: enough to round-trip any double."""
    return format(float(value), ".17g")


class ResultExporter:
    """Write solver results under one output directory."""

    def __init__(self, output: OutputSettings, directory: Optional[Path] = None) -> None:
        """Initialize exporter.

        Args:
            output: File names and grid resolution
            directory: Overrides ``output.directory`` when given
        """
        self.output = output
        self.directory = Path(directory or output.directory)

    def prepare(self) -> Path:
        """Create the output directory; ConfigError when it cannot be written."""
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise ConfigError(f"Cannot create output directory {self.directory}: {e.strerror}",
                              "output.directory") from e
        if not self.directory.is_dir():
            raise ConfigError(f"Output path {self.directory} is not a directory", "output.directory")
        return self.directory

    def path(self, name: str) -> Path:
        return self.directory / getattr(self.output, name)

    def write_coefficients(self, u: Cheb2D) -> Path:
        """Row i holds the y-degree i, column j the x-degree j."""
        path = self.path("coefficients")
        with open(path, 'w', newline='', encoding='utf-8') as f:
            writer = csv.writer(f, lineterminator="\n")
            for row in u.coeffs:
                writer.writerow([format_float(v) for v in row])
        logger.info(f"Wrote {u.shape[0]}x{u.shape[1]} coefficients to {path}")
        return path

    def write_grid(self, u: Cheb2D) -> Path:
        """u on a uniform grid_size x grid_size grid, x varying fastest."""
        path = self.path("grid")
        t = np.linspace(-1.0, 1.0, self.output.grid_size)
        values = evaluate_grid(u, t, t)
        with open(path, 'w', newline='', encoding='utf-8') as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(GRID_HEADER)
            for a, y in enumerate(t):
                for b, x in enumerate(t):
                    writer.writerow([format_float(x), format_float(y), format_float(values[a, b])])
        logger.info(f"Wrote {t.size}x{t.size} grid to {path}")
        return path

    def write_report(self, data: Dict[str, Any]) -> Path:
        path = self.path("report")
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(data, f, indent=2, ensure_ascii=False)
            f.write("\n")
        logger.info(f"Wrote report to {path}")
        return path

    def write_benchmark(self, rows: List[Dict[str, Any]]) -> Path:
        path = self.path("benchmark")
        with open(path, 'w', newline='', encoding='utf-8') as f:
            writer = csv.DictWriter(f, fieldnames=BENCHMARK_FIELDS, lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
        logger.info(f"Wrote {len(rows)} benchmark rows to {path}")
        return path
