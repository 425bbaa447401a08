"""Shared pytest fixtures for uspoisson tests.

Provides boundary-condition sets, small assembled systems and problem-file helpers.
"""
# Created: 2026-10-18

import pytest
import numpy as np
from pathlib import Path
from typing import List

# Import from the src layout without installing
import sys
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from uspoisson.adi import SylvesterSystem
from uspoisson.poisson import ProblemSpec, assemble
from uspoisson.recomb import BCKind, BoundarySpec

PROBLEMS_DIR = Path(__file__).parent.parent / "docs" / "problems"

MINIMAL_PROBLEM = """\
equation:
  rhs: "-2*(1 - y^2) - 2*(1 - x^2)"
  exact: "(1 - x^2)*(1 - y^2)"
bc:
  left: {kind: dirichlet}
  right: {kind: dirichlet}
  bottom: {kind: dirichlet}
  top: {kind: dirichlet}
solver:
  tolerance: 1e-12
  max_n: 64
output:
  grid_size: 11
"""


def dirichlet_bcs() -> List[BoundarySpec]:
    """Zero Dirichlet data on all four sides."""
    return [BoundarySpec(side, BCKind.DIRICHLET) for side in ("left", "right", "bottom", "top")]


def mixed_bcs(kind: str, theta: float = 1.0) -> List[BoundarySpec]:
    """Dirichlet on left and bottom, ``kind`` (homogeneous) on right and top."""
    if kind == "dirichlet":
        return dirichlet_bcs()
    upper = BCKind(kind)
    theta = theta if upper is BCKind.ROBIN else 0.0
    return [
        BoundarySpec("left", BCKind.DIRICHLET),
        BoundarySpec("right", upper, theta=theta),
        BoundarySpec("bottom", BCKind.DIRICHLET),
        BoundarySpec("top", upper, theta=theta),
    ]


def clamped_bcs() -> List[BoundarySpec]:
    """Zero clamped data on all four sides (fourth order)."""
    specs = []
    for side in ("left", "right", "bottom", "top"):
        specs.append(BoundarySpec(side, BCKind.DIRICHLET))
        specs.append(BoundarySpec(side, BCKind.NEUMANN))
    return specs


def random_system(spec: ProblemSpec, n: int, seed: int = 0) -> SylvesterSystem:
    """Level-n system of ``spec`` with a random dense right-hand side."""
    rng = np.random.default_rng(seed)
    return assemble(spec, n, rng.standard_normal((n, n)))


@pytest.fixture
def rng():
    """Seeded random generator."""
    return np.random.default_rng(1234)


@pytest.fixture
def dirichlet_spec():
    """Zero-Dirichlet Poisson problem with a random-friendly default tolerance."""
    return ProblemSpec(bcs=dirichlet_bcs(), tolerance=1e-13)


@pytest.fixture
def problems_dir():
    """The worked example problem files."""
    return PROBLEMS_DIR


@pytest.fixture
def write_problem(tmp_path):
    """Write problem-file text under tmp_path and return its path."""
    def _write(text: str, name: str = "problem.yaml") -> Path:
        path = tmp_path / name
        path.write_text(text)
        return path
    return _write


@pytest.fixture
def config_dir(tmp_path):
    """Empty user configuration directory."""
    path = tmp_path / "config"
    path.mkdir()
    return path
