"""Tiny arithmetic expression grammar for user-defined problems.

Supported: + - * / ^ (or **), unary minus, parentheses, numeric literals,
sin, cos, exp, and a caller-supplied symbol set (x, t, u, u_x, u_xx, u_t,
P1..Ps).  Expressions compile to callables over the dispatch ops in
:mod:`ifpinn.autodiff`, so the same string works on arrays, graph nodes, and
jets.
"""

from __future__ import annotations

import ast

from . import autodiff as ad

_FUNCTIONS = {"sin": ad.sin, "cos": ad.cos, "exp": ad.exp}

_BINOPS = {
    ast.Add: ad.add,
    ast.Sub: ad.sub,
    ast.Mult: ad.mul,
    ast.Div: ad.div,
}


class ExpressionError(ValueError):
    pass


def _check(node, allowed):
    if isinstance(node, ast.Expression):
        _check(node.body, allowed)
    elif isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            if not isinstance(node.right, (ast.Constant, ast.UnaryOp)):
                raise ExpressionError("exponents must be numeric constants")
        elif type(node.op) not in _BINOPS:
            raise ExpressionError(f"operator {type(node.op).__name__} not allowed")
        _check(node.left, allowed)
        _check(node.right, allowed)
    elif isinstance(node, ast.UnaryOp):
        if not isinstance(node.op, (ast.USub, ast.UAdd)):
            raise ExpressionError(f"operator {type(node.op).__name__} not allowed")
        _check(node.operand, allowed)
    elif isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCTIONS:
            raise ExpressionError("only sin, cos, exp calls are allowed")
        if len(node.args) != 1 or node.keywords:
            raise ExpressionError(f"{node.func.id} takes exactly one argument")
        _check(node.args[0], allowed)
    elif isinstance(node, ast.Name):
        if node.id not in allowed:
            raise ExpressionError(f"unknown symbol '{node.id}'")
    elif isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float)):
            raise ExpressionError(f"literal {node.value!r} not allowed")
    else:
        raise ExpressionError(f"syntax element {type(node).__name__} not allowed")


def _eval(node, env):
    if isinstance(node, ast.Expression):
        return _eval(node.body, env)
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            return ad.power(_eval(node.left, env), _const_value(node.right))
        return _BINOPS[type(node.op)](_eval(node.left, env), _eval(node.right, env))
    if isinstance(node, ast.UnaryOp):
        operand = _eval(node.operand, env)
        return ad.neg(operand) if isinstance(node.op, ast.USub) else operand
    if isinstance(node, ast.Call):
        return _FUNCTIONS[node.func.id](_eval(node.args[0], env))
    if isinstance(node, ast.Name):
        return env[node.id]
    return float(node.value)


def _const_value(node):
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        return -_const_value(node.operand)
    raise ExpressionError("exponents must be numeric constants")


def compile_expression(text, symbols):
    """Compile an expression string to ``callable(env) -> value``.

    ``symbols`` is the set of names the expression may reference; the
    returned callable looks them up in its ``env`` mapping.
    """
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse '{text}': {exc.msg}") from exc
    allowed = set(symbols)
    _check(tree, allowed)
    free = {n.id for n in ast.walk(tree) if isinstance(n, ast.Name)} - set(_FUNCTIONS)

    def fn(env):
        return _eval(tree, env)

    fn.free_symbols = free
    fn.source = text
    return fn
