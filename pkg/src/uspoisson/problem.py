"""Problem files: YAML with equation, bc, solver, output and benchmark sections.

Every error names the dotted key (``bc.top.theta``) and, when the key exists
in the file, its 1-based line number.
"""
# Created: 2026-10-18

import logging
from dataclasses import dataclass, field
from math import isfinite
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import yaml
from numpy.typing import ArrayLike

from .config.settings import BenchmarkSettings, OutputSettings, Settings
from .errors import ConfigError, ExpressionError
from .exprparse import Expr, Value, parse
from .poisson import BIHARMONIC, EQUATIONS, FADI, SOLVERS, ProblemSpec
from .recomb import BCKind, BoundarySpec, SIDES

logger = logging.getLogger(__name__)

TOP_KEYS = ("equation", "bc", "solver", "output", "benchmark")
EQUATION_KEYS = ("kind", "rhs", "rhs_terms", "rho_x", "rho_y", "exact")
BC_KEYS = ("kind", "data", "theta", "slope")
SOLVER_KEYS = ("method", "tolerance", "max_n", "check_every", "factor_rhs")
OUTPUT_KEYS = ("directory", "grid_size", "coefficients", "grid", "report", "benchmark")
BENCHMARK_KEYS = ("sizes", "tolerances")
CLAMPED = "clamped"


@dataclass
class RunConfig:
    """A parsed problem file plus where its results go."""
    problem: ProblemSpec
    output: OutputSettings = field(default_factory=OutputSettings)
    benchmark: BenchmarkSettings = field(default_factory=BenchmarkSettings)
    source: Optional[Path] = None
    deterministic: bool = True
    expressions: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.output.grid_size < 2:
            raise ConfigError("Grid needs at least 2 points per side", "output.grid_size")


class SumOfProducts:
    """f(x, y) = sum_i v_i(x) u_i(y) from separate factor expressions."""

    def __init__(self, terms: Sequence[Tuple[Expr, Expr]]) -> None:
        self.terms = list(terms)

    def __call__(self, x: ArrayLike, y: ArrayLike) -> Value:
        total = 0.0
        for u, v in self.terms:
            total = total + u(x, y) * v(x, y)
        return total


class _Reader:
    """Walks the loaded document with the node tree alongside for line numbers."""

    def __init__(self, data: Any, lines: Dict[str, int]) -> None:
        self.data = data if data is not None else {}
        self.lines = lines

    def error(self, message: str, key: str) -> ConfigError:
        line = self.lines.get(key)
        if line is None and "." in key:
            line = self.lines.get(key.rsplit(".", 1)[0])
        return ConfigError(message, key, line)

    def section(self, value: Any, key: str, allowed: Sequence[str]) -> Dict[str, Any]:
        if value is None:
            return {}
        if not isinstance(value, dict):
            raise self.error("Expected a mapping", key)
        for name in value:
            if name not in allowed:
                raise self.error(f"Unknown key {name!r}", f"{key}.{name}" if key else str(name))
        return value

    def expression(self, value: Any, key: str) -> Expr:
        if isinstance(value, bool) or not isinstance(value, (str, int, float)):
            raise self.error("Expected an expression", key)
        try:
            return parse(value if isinstance(value, str) else repr(value))
        except ExpressionError as e:
            raise self.error(f"Bad expression: {e}", key) from e

    def number(self, value: Any, key: str, kind: type = float) -> Any:
        if isinstance(value, bool):
            raise self.error(f"Expected a {kind.__name__}", key)
        try:
            number = kind(value)
        except (TypeError, ValueError):
            raise self.error(f"Expected a {kind.__name__}, got {value!r}", key) from None
        if kind is int and isinstance(value, float) and value != number:
            raise self.error(f"Expected an integer, got {value!r}", key)
        return number


def parse_config(src: str, settings: Optional[Settings] = None, source: Optional[Path] = None) -> RunConfig:
    """Parse problem-file text; expressions are parsed here, at load time."""
    settings = settings or Settings()
    loader = yaml.SafeLoader(src)
    try:
        node = loader.get_single_node()
        data = loader.construct_document(node) if node is not None else {}
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise ConfigError(f"Invalid YAML: {getattr(e, 'problem', e)}", None,
                          mark.line + 1 if mark else None) from e
    finally:
        loader.dispose()

    lines: Dict[str, int] = {}
    if node is not None:
        _line_map(node, "", lines)
    reader = _Reader(data, lines)
    top = reader.section(data, "", TOP_KEYS)
    expressions: Dict[str, str] = {}

    equation = reader.section(top.get("equation"), "equation", EQUATION_KEYS)
    kind = equation.get("kind", "poisson")
    if kind not in EQUATIONS:
        raise reader.error(f"Unknown equation kind {kind!r}; expected one of {EQUATIONS}", "equation.kind")
    if "rhs" not in equation and "rhs_terms" not in equation:
        raise reader.error("Missing required key 'rhs'", "equation.rhs")
    rhs, rhs_is_expression = _read_rhs(reader, equation, expressions)
    optional: Dict[str, Optional[Expr]] = {}
    for name in ("rho_x", "rho_y", "exact"):
        optional[name] = None
        if equation.get(name) is not None:
            optional[name] = reader.expression(equation[name], f"equation.{name}")
            expressions[f"equation.{name}"] = str(equation[name])

    bcs = _read_bcs(reader, top.get("bc"), kind, expressions)

    solver = reader.section(top.get("solver"), "solver", SOLVER_KEYS)
    method = solver.get("method", settings.solver.method)
    if method not in SOLVERS:
        raise reader.error(f"Unknown solver {method!r}; expected one of {SOLVERS}", "solver.method")
    factor_rhs = bool(solver.get("factor_rhs", False))
    if method == FADI and rhs_is_expression and not factor_rhs:
        raise reader.error(
            "fadi needs a low-rank right-hand side: give equation.rhs_terms, or set "
            "solver.factor_rhs: true to factor f by cross approximation",
            "solver.factor_rhs",
        )

    try:
        problem = ProblemSpec(
            equation=kind,
            rhs=rhs,
            bcs=bcs,
            rho_x=optional["rho_x"],
            rho_y=optional["rho_y"],
            tolerance=reader.number(solver.get("tolerance", settings.solver.tolerance), "solver.tolerance"),
            max_n=reader.number(solver.get("max_n", settings.solver.max_n), "solver.max_n", int),
            solver=method,
            check_every=reader.number(solver.get("check_every", settings.solver.check_every),
                                      "solver.check_every", int),
            exact=optional["exact"],
            initial_n=settings.solver.initial_n,
            empirical_safety=settings.solver.empirical_safety,
            empirical_iters=settings.solver.empirical_iters,
            rho_samples=settings.solver.rho_samples,
            rho_inflation=settings.solver.rho_inflation,
            aca_tolerance=settings.solver.aca_tolerance,
        )
    except ConfigError as e:
        if e.line is None and e.key:
            raise reader.error(e.message, e.key) from e
        raise

    output = _read_output(reader, top.get("output"), settings.output)
    benchmark = _read_benchmark(reader, top.get("benchmark"), settings.benchmark)
    return RunConfig(problem, output, benchmark, source, True, expressions)


def load_problem(path: Path, settings: Optional[Settings] = None) -> RunConfig:
    """Read and parse a problem file."""
    path = Path(path)
    try:
        src = path.read_text()
    except OSError as e:
        raise ConfigError(f"Cannot read problem file {path}: {e.strerror}") from e
    logger.debug(f"Loading problem file {path}")
    return parse_config(src, settings, path)


def _read_rhs(reader: _Reader, equation: Dict[str, Any], expressions: Dict[str, str]
              ) -> Tuple[Callable, bool]:
    if "rhs_terms" in equation:
        if "rhs" in equation:
            raise reader.error("Give either rhs or rhs_terms, not both", "equation.rhs_terms")
        terms = equation["rhs_terms"]
        if not isinstance(terms, list) or not terms:
            raise reader.error("Expected a nonempty list of {x, y} factor pairs", "equation.rhs_terms")
        pairs = []
        for i, term in enumerate(terms):
            key = f"equation.rhs_terms.{i}"
            term = reader.section(term, key, ("x", "y"))
            if "x" not in term or "y" not in term:
                raise reader.error("Each term needs both an x and a y factor", key)
            u = reader.expression(term["y"], f"{key}.y")
            v = reader.expression(term["x"], f"{key}.x")
            if "x" in u.variables or "y" in v.variables:
                raise reader.error("Factor y must depend on y only and x on x only", key)
            pairs.append((u, v))
            expressions[key] = f"({term['x']})*({term['y']})"
        return SumOfProducts(pairs), False
    expressions["equation.rhs"] = str(equation["rhs"])
    return reader.expression(equation["rhs"], "equation.rhs"), True


def _read_bcs(reader: _Reader, bc: Any, kind: str, expressions: Dict[str, str]) -> List[BoundarySpec]:
    sides = reader.section(bc, "bc", SIDES)
    specs: List[BoundarySpec] = []
    for side in SIDES:
        key = f"bc.{side}"
        if side not in sides:
            raise reader.error(f"Missing required key {side!r}", key)
        entry = reader.section(sides[side], key, BC_KEYS)
        if "kind" not in entry:
            raise reader.error("Missing required key 'kind'", f"{key}.kind")
        bc_kind = str(entry["kind"]).lower()
        data = _data(reader, entry.get("data"), f"{key}.data", expressions)

        if bc_kind == CLAMPED:
            if kind != BIHARMONIC:
                raise reader.error("clamped sides belong to biharmonic problems", f"{key}.kind")
            slope = _data(reader, entry.get("slope"), f"{key}.slope", expressions)
            specs.append(BoundarySpec(side, BCKind.DIRICHLET, data=data))
            specs.append(BoundarySpec(side, BCKind.NEUMANN, data=slope))
            continue
        if kind == BIHARMONIC:
            raise reader.error("biharmonic problems need clamped sides", f"{key}.kind")
        if "slope" in entry:
            raise reader.error("slope applies to clamped sides only", f"{key}.slope")
        try:
            bc_kind = BCKind(bc_kind)
        except ValueError:
            raise reader.error(
                f"Unknown boundary kind {entry['kind']!r}; expected dirichlet, neumann, robin or clamped",
                f"{key}.kind",
            ) from None
        theta = 0.0
        if bc_kind is BCKind.ROBIN:
            if "theta" not in entry:
                raise reader.error("Robin condition requires theta", f"{key}.theta")
            theta = reader.number(entry["theta"], f"{key}.theta")
            if theta == 0 or not isfinite(theta):
                raise reader.error("theta must be finite and nonzero", f"{key}.theta")
        elif "theta" in entry:
            raise reader.error("theta applies to robin sides only", f"{key}.theta")
        specs.append(BoundarySpec(side, bc_kind, theta=theta, data=data))
    return specs


def _data(reader: _Reader, value: Any, key: str, expressions: Dict[str, str]) -> Optional[Expr]:
    if value is None:
        return None
    expr = reader.expression(value, key)
    expressions[key] = str(value)
    return None if expr.is_zero else expr


def _read_output(reader: _Reader, value: Any, defaults: OutputSettings) -> OutputSettings:
    section = reader.section(value, "output", OUTPUT_KEYS)
    output = OutputSettings(**vars(defaults))
    for key, item in section.items():
        if key == "grid_size":
            item = reader.number(item, "output.grid_size", int)
        elif not isinstance(item, str):
            raise reader.error("Expected a path", f"output.{key}")
        setattr(output, key, item)
    return output


def _read_benchmark(reader: _Reader, value: Any, defaults: BenchmarkSettings) -> BenchmarkSettings:
    section = reader.section(value, "benchmark", BENCHMARK_KEYS)
    benchmark = BenchmarkSettings(list(defaults.sizes), list(defaults.tolerances))
    if "sizes" in section:
        sizes = section["sizes"]
        if not isinstance(sizes, list) or not sizes:
            raise reader.error("Expected a nonempty list of sizes", "benchmark.sizes")
        benchmark.sizes = [reader.number(s, f"benchmark.sizes.{i}", int) for i, s in enumerate(sizes)]
        for i, s in enumerate(benchmark.sizes):
            if s < 16 or s & (s - 1):
                raise reader.error(f"Size {s} must be a power of two >= 16", f"benchmark.sizes.{i}")
    if "tolerances" in section:
        tolerances = section["tolerances"]
        if not isinstance(tolerances, list) or not tolerances:
            raise reader.error("Expected a nonempty list of tolerances", "benchmark.tolerances")
        benchmark.tolerances = [reader.number(t, f"benchmark.tolerances.{i}")
                                for i, t in enumerate(tolerances)]
    return benchmark


def _line_map(node: yaml.Node, prefix: str, lines: Dict[str, int]) -> None:
    """Record the 1-based line of every key under its dotted path."""
    if isinstance(node, yaml.MappingNode):
        for key_node, value_node in node.value:
            key = f"{prefix}.{key_node.value}" if prefix else str(key_node.value)
            lines[key] = key_node.start_mark.line + 1
            _line_map(value_node, key, lines)
    elif isinstance(node, yaml.SequenceNode):
        for i, item in enumerate(node.value):
            key = f"{prefix}.{i}"
            lines[key] = item.start_mark.line + 1
            _line_map(item, key, lines)
