import numpy as np
import pytest

import ifpinn.autodiff as ad
from ifpinn.expressions import ExpressionError, compile_expression


def test_basic_arithmetic():
    fn = compile_expression("2*x + 1", {"x"})
    assert fn({"x": 3.0}) == pytest.approx(7.0)
    assert fn.free_symbols == {"x"}
    assert fn.source == "2*x + 1"


def test_caret_power():
    fn = compile_expression("x^2 + x**3", {"x"})
    assert fn({"x": 2.0}) == pytest.approx(12.0)


def test_negative_exponent():
    fn = compile_expression("x^-1", {"x"})
    assert fn({"x": 4.0}) == pytest.approx(0.25)


def test_functions_and_unary_minus():
    fn = compile_expression("-sin(x) + cos(x)*exp(t)", {"x", "t"})
    x, t = 0.4, 0.2
    assert fn({"x": x, "t": t}) == pytest.approx(-np.sin(x) + np.cos(x) * np.exp(t))


def test_works_on_arrays_and_nodes():
    fn = compile_expression("sin(x)*u", {"x", "u"})
    x = np.array([0.1, 0.2])
    np.testing.assert_allclose(fn({"x": x, "u": 2.0}), 2.0 * np.sin(x))
    xn = ad.variable("x", 0.5)
    out = fn({"x": xn, "u": 3.0})
    assert isinstance(out, ad.Node)
    assert float(ad.evaluate(out)) == pytest.approx(3.0 * np.sin(0.5))


def test_unknown_symbol_rejected():
    with pytest.raises(ExpressionError, match="unknown symbol"):
        compile_expression("x + y", {"x"})


def test_disallowed_call_rejected():
    with pytest.raises(ExpressionError):
        compile_expression("sqrt(x)", {"x"})
    with pytest.raises(ExpressionError):
        compile_expression("__import__('os')", {"x"})


def test_variable_exponent_rejected():
    with pytest.raises(ExpressionError, match="exponent"):
        compile_expression("x^t", {"x", "t"})


def test_syntax_error_reported():
    with pytest.raises(ExpressionError, match="cannot parse"):
        compile_expression("x +* 2", {"x"})


def test_comparison_rejected():
    with pytest.raises(ExpressionError):
        compile_expression("x < 1", {"x"})
