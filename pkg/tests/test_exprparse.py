"""Tests for the expression parser and evaluator used by problem files."""
# Created: 2026-10-18

import numpy as np
import pytest
from hypothesis import given, strategies as st

from uspoisson.errors import DomainError, ExpressionSyntaxError, UnknownIdentifierError
from uspoisson.exprparse import (
    FUNCTIONS, BinOp, Call, Const, Expr, Neg, Num, Var, evaluate, parse, to_text,
)


class TestPrecedence:
    """^ binds tighter than unary minus and associates to the right."""

    @pytest.mark.parametrize("text, x, expected", [
        ("-x^2", 3.0, -9.0),
        ("2^3^2", 0.0, 512.0),
        ("-2^2", 0.0, -4.0),
        ("2^-1", 0.0, 0.5),
        ("1 - 2 - 3", 0.0, -4.0),
        ("8 / 4 / 2", 0.0, 1.0),
        ("2 + 3*x", 2.0, 8.0),
        ("(2 + 3)*x", 2.0, 10.0),
        ("+x", 4.0, 4.0),
        ("--x", 4.0, 4.0),
    ])
    def test_values(self, text, x, expected):
        assert parse(text)(x) == pytest.approx(expected)

    def test_power_tree_shape(self):
        assert parse("-x^2").root == Neg(BinOp("^", Var("x"), Num(2.0)))


class TestEvaluation:

    def test_oscillatory_forcing(self):
        f = parse("-100*x*sin(20*pi*x^2*y)*cos(4*pi*(x+y))")
        assert f(0.5, 0.5) == pytest.approx(-50.0, rel=1e-12)

    def test_constants_and_numbers(self):
        assert parse("e")(0.0) == pytest.approx(np.e)
        assert parse("pi")(0.0) == pytest.approx(np.pi)
        assert parse("1e-3 + .5")(0.0) == pytest.approx(0.501)

    def test_functions(self):
        for name, func in FUNCTIONS.items():
            assert parse(f"{name}(x)")(0.7) == pytest.approx(func(0.7))

    def test_broadcasting(self):
        x = np.array([1.0, 2.0])
        y = np.array([[10.0], [20.0]])
        values = evaluate(parse("x + y"), x, y)
        np.testing.assert_array_equal(values, [[11.0, 12.0], [21.0, 22.0]])

    def test_scalar_result_is_float(self):
        assert isinstance(parse("x*y")(2.0, 3.0), float)

    def test_variables(self):
        assert parse("sin(x)*2").variables == {"x"}
        assert parse("x*y").variables == {"x", "y"}
        assert parse("pi").variables == frozenset()

    def test_is_zero(self):
        assert parse("0").is_zero
        assert not parse("0*x").is_zero

    def test_str_keeps_source(self):
        assert str(parse("x^2")) == "x^2"


class TestErrors:
    """Syntax errors carry the offset of the offending character."""

    @pytest.mark.parametrize("text, offset", [
        ("1 +", 3),
        ("x $ y", 2),
        ("sin(x", 5),
        ("sin x", 4),
        ("(x + 1))", 7),
        ("", 0),
    ])
    def test_syntax_offsets(self, text, offset):
        with pytest.raises(ExpressionSyntaxError) as excinfo:
            parse(text)
        assert excinfo.value.offset == offset
        assert f"offset {offset}" in str(excinfo.value)

    def test_unknown_function(self):
        with pytest.raises(UnknownIdentifierError) as excinfo:
            parse("foo(x)")
        assert excinfo.value.offset == 0
        assert excinfo.value.name == "foo"

    def test_unknown_variable(self):
        with pytest.raises(UnknownIdentifierError) as excinfo:
            parse("x + z")
        assert excinfo.value.offset == 4

    @pytest.mark.parametrize("text", ["log(x - 1)", "1/(x - 1)", "sqrt(-x)", "exp(1000*x)"])
    def test_domain_errors(self, text):
        with pytest.raises(DomainError):
            parse(text)(1.0)

    def test_domain_error_on_any_array_entry(self):
        with pytest.raises(DomainError):
            parse("log(x)")(np.array([1.0, 0.5, 0.0]))


# ----- round trip --------------------------------------------------------------

leaves = st.one_of(
    st.floats(min_value=0.0, max_value=1e6, allow_nan=False, allow_infinity=False).map(Num),
    st.sampled_from(["x", "y"]).map(Var),
    st.sampled_from(["pi", "e"]).map(Const),
)

trees = st.recursive(
    leaves,
    lambda children: st.one_of(
        children.map(Neg),
        st.builds(BinOp, st.sampled_from(["+", "-", "*", "/", "^"]), children, children),
        st.builds(Call, st.sampled_from(sorted(FUNCTIONS)), children),
    ),
    max_leaves=12,
)


@given(trees)
def test_printed_tree_parses_back(tree):
    assert parse(to_text(tree)).root == tree


@given(trees)
def test_to_text_accepts_expr(tree):
    assert to_text(Expr(tree)) == to_text(tree)
