"""Arithmetic expressions in x and y for problem files.

Grammar (whitespace is ignored)::

    expr   = term { ("+" | "-") term }
    term   = unary { ("*" | "/") unary }
    unary  = ("-" | "+") unary | power
    power  = atom [ "^" unary ]
    atom   = number | "x" | "y" | "pi" | "e"
           | func "(" expr ")" | "(" expr ")"
    func   = "sin" | "cos" | "exp" | "log" | "sqrt" | "abs"

``^`` is right-associative and binds tighter than unary minus, so
``-x^2`` is ``-(x^2)`` and ``2^3^2`` is 512.
"""
# Created: 2026-10-18

import logging
import re
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterator, List, Union

import numpy as np
from numpy.typing import ArrayLike

from .errors import DomainError, ExpressionSyntaxError, UnknownIdentifierError

logger = logging.getLogger(__name__)

VARIABLES = ("x", "y")
CONSTANTS: Dict[str, float] = {"pi": np.pi, "e": np.e}
FUNCTIONS: Dict[str, Callable] = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
}

TOKEN_PATTERN = re.compile(r"""
    (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_]\w*)
  | (?P<op>[-+*/^()])
  | (?P<space>\s+)
  | (?P<bad>.)
""", re.VERBOSE)


# ----- syntax tree -------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Var:
    name: str
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Const:
    name: str
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Neg:
    operand: 'Node'
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: 'Node'
    right: 'Node'
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Call:
    func: str
    arg: 'Node'
    offset: int = field(default=0, compare=False)


Node = Union[Num, Var, Const, Neg, BinOp, Call]
Value = Union[float, np.ndarray]


@dataclass(frozen=True)
class Expr:
    """A parsed expression; call it with x and y (scalars or arrays)."""
    root: Node
    source: str = field(default="", compare=False)

    def __call__(self, x: ArrayLike, y: ArrayLike = 0.0) -> Value:
        return evaluate(self, x, y)

    @property
    def variables(self) -> FrozenSet[str]:
        return frozenset(_variables(self.root))

    @property
    def is_zero(self) -> bool:
        return isinstance(self.root, Num) and self.root.value == 0

    def to_text(self) -> str:
        return to_text(self.root)

    def __str__(self) -> str:
        return self.source or self.to_text()


# ----- parsing -----------------------------------------------------------------

@dataclass
class _Token:
    kind: str
    text: str
    offset: int


def _tokenize(src: str) -> Iterator[_Token]:
    for m in TOKEN_PATTERN.finditer(src):
        kind = m.lastgroup
        if kind == "space":
            continue
        if kind == "bad":
            raise ExpressionSyntaxError(f"Unexpected character {m.group()!r}", m.start())
        yield _Token(kind, m.group(), m.start())
    yield _Token("end", "", len(src))


class _Parser:
    """Recursive descent over the token list, one method per grammar rule."""

    def __init__(self, src: str) -> None:
        self.tokens: List[_Token] = list(_tokenize(src))
        self.pos = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def expect(self, text: str) -> _Token:
        token = self.current
        if token.text != text or token.kind != "op":
            found = "end of input" if token.kind == "end" else repr(token.text)
            raise ExpressionSyntaxError(f"Expected {text!r}, found {found}", token.offset)
        return self.advance()

    def parse(self) -> Node:
        node = self.expr()
        if self.current.kind != "end":
            raise ExpressionSyntaxError(f"Unexpected {self.current.text!r}", self.current.offset)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.current.kind == "op" and self.current.text in "+-":
            token = self.advance()
            node = BinOp(token.text, node, self.term(), token.offset)
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.current.kind == "op" and self.current.text in "*/":
            token = self.advance()
            node = BinOp(token.text, node, self.unary(), token.offset)
        return node

    def unary(self) -> Node:
        if self.current.kind == "op" and self.current.text in "+-":
            token = self.advance()
            operand = self.unary()
            return Neg(operand, token.offset) if token.text == "-" else operand
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.current.kind == "op" and self.current.text == "^":
            token = self.advance()
            return BinOp("^", base, self.unary(), token.offset)
        return base

    def atom(self) -> Node:
        token = self.current
        if token.kind == "number":
            self.advance()
            return Num(float(token.text), token.offset)
        if token.kind == "name":
            self.advance()
            name = token.text
            if name in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(name, arg, token.offset)
            if name in VARIABLES:
                return Var(name, token.offset)
            if name in CONSTANTS:
                return Const(name, token.offset)
            raise UnknownIdentifierError(name, token.offset)
        if token.kind == "op" and token.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if token.kind == "end" else repr(token.text)
        raise ExpressionSyntaxError(f"Expected a number, name or '(', found {found}", token.offset)


def parse(src: str) -> Expr:
    """Parse expression text; errors carry the character offset."""
    if not isinstance(src, str):
        src = repr(src) if isinstance(src, (int, float)) else str(src)
    return Expr(_Parser(src).parse(), src)


# ----- evaluation --------------------------------------------------------------

def evaluate(e: Expr, x: ArrayLike, y: ArrayLike = 0.0) -> Value:
    """Evaluate with IEEE doubles; broadcasts over array arguments."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    with np.errstate(all="ignore"):
        value = _eval(e.root, x, y)
    if np.ndim(value) == 0:
        return float(value)
    return value


def _eval(node: Node, x: np.ndarray, y: np.ndarray) -> Value:
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Const):
        return CONSTANTS[node.name]
    if isinstance(node, Var):
        return x if node.name == "x" else y
    if isinstance(node, Neg):
        return -_eval(node.operand, x, y)
    if isinstance(node, Call):
        arg = _eval(node.arg, x, y)
        if node.func == "log" and np.any(np.asarray(arg) <= 0):
            raise DomainError(f"log of a nonpositive value in {to_text(node)}")
        if node.func == "sqrt" and np.any(np.asarray(arg) < 0):
            raise DomainError(f"sqrt of a negative value in {to_text(node)}")
        return _finite(FUNCTIONS[node.func](arg), node)
    left = _eval(node.left, x, y)
    right = _eval(node.right, x, y)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    if node.op == "/":
        if np.any(np.asarray(right) == 0):
            raise DomainError(f"Division by zero in {to_text(node)}")
        return _finite(left / right, node)
    return _finite(np.power(left, right), node)


def _finite(value: Value, node: Node) -> Value:
    if not np.all(np.isfinite(value)):
        raise DomainError(f"Non-finite value in {to_text(node)}")
    return value


def _variables(node: Node) -> Iterator[str]:
    if isinstance(node, Var):
        yield node.name
    elif isinstance(node, Neg):
        yield from _variables(node.operand)
    elif isinstance(node, Call):
        yield from _variables(node.arg)
    elif isinstance(node, BinOp):
        yield from _variables(node.left)
        yield from _variables(node.right)


# ----- printing ----------------------------------------------------------------

def to_text(node: Node) -> str:
    """Fully parenthesized text that parses back to the same tree."""
    if isinstance(node, Expr):
        node = node.root
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, (Var, Const)):
        return node.name
    if isinstance(node, Neg):
        return f"(-{to_text(node.operand)})"
    if isinstance(node, Call):
        return f"{node.func}({to_text(node.arg)})"
    return f"({to_text(node.left)} {node.op} {to_text(node.right)})"
