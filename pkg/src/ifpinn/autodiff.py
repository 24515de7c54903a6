"""Reverse-mode automatic differentiation on small computation graphs.

Values are float64 numpy arrays (scalars are 0-d arrays), so the same engine
serves both the scalar examples and the batched collocation-point evaluations
used by the training loop.  Graphs are acyclic and rebuilt per use; reductions
run in fixed creation order, which makes repeated evaluations bit-identical.

Besides plain reverse mode, the module provides :class:`Jet`, a truncated
Taylor object carrying (value, d/dx, d2/dx2, d/dt) where each component is
itself a graph node.  Threading jets through a forward map yields input
derivatives that stay differentiable with respect to any parameters appearing
in the map (nested differentiation).
"""

from __future__ import annotations

import itertools

import numpy as np

_ids = itertools.count()


class AutodiffError(RuntimeError):
    """Base class for graph evaluation/differentiation failures."""


class UnboundVariableError(AutodiffError):
    pass


class NonFiniteError(AutodiffError):
    pass


class UnsupportedOperationError(AutodiffError):
    pass


def _as_value(x):
    return np.asarray(x, dtype=np.float64)


def _unbroadcast(grad, shape):
    """Reduce ``grad`` back to ``shape`` after numpy broadcasting."""
    grad = np.asarray(grad)
    if grad.shape == shape:
        return grad
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


class Node:
    """One operation in the computation graph.

    ``_fwd`` recomputes the cached value from parent values; ``_bwd`` maps the
    incoming adjoint to one adjoint per parent.  Constant operands are folded
    into the closures instead of materializing extra nodes.
    """

    __slots__ = ("op", "parents", "value", "grad", "name", "_fwd", "_bwd", "_id")

    # keep numpy from absorbing us into object arrays; defer to our r-ops
    __array_ufunc__ = None

    def __init__(self, op, parents=(), fwd=None, bwd=None, value=None, name=None):
        self.op = op
        self.parents = tuple(parents)
        self.name = name
        self._fwd = fwd
        self._bwd = bwd
        self._id = next(_ids)
        self.grad = None
        if value is not None:
            self.value = _as_value(value)
        elif fwd is not None and all(p.value is not None for p in self.parents):
            self.value = fwd(*(p.value for p in self.parents))
        else:
            self.value = None

    def __repr__(self):
        tag = self.name if self.name is not None else self.op
        return f"Node({tag}, value={self.value})"

    # -- operator sugar -------------------------------------------------
    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, exponent):
        return power(self, exponent)

    def __matmul__(self, other):
        return matmul(self, other)

    def __rmatmul__(self, other):
        return matmul(other, self)

    def __abs__(self):
        raise UnsupportedOperationError(
            "abs is not differentiable; use square() for |.|^2 terms"
        )


def variable(name, value=None):
    """A leaf the gradient is taken with respect to."""
    return Node("var", value=value if value is None else _as_value(value), name=name)


def constant(value):
    return Node("const", value=_as_value(value))


def describe(node, depth=4):
    """Short op-path string for error messages."""
    parts = []
    cur = node
    while cur is not None and depth > 0:
        parts.append(cur.name if cur.name is not None else cur.op)
        cur = cur.parents[0] if cur.parents else None
        depth -= 1
    return " <- ".join(parts)


# ---------------------------------------------------------------------------
# graph traversal


def _topo(root):
    """Reachable nodes in creation order (parents always precede children)."""
    seen = set()
    stack = [root]
    out = []
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        out.append(node)
        stack.extend(node.parents)
    out.sort(key=lambda n: n._id)
    return out


def evaluate(root, bindings=None, check_finite=True):
    """Evaluate the graph, binding variables by name.

    Re-running with identical bindings yields bit-identical values.  Raises
    :class:`UnboundVariableError` for variables without a value and
    :class:`NonFiniteError` (with the op path) on overflow / division by zero.
    """
    if not isinstance(root, Node):
        return _as_value(root)
    bindings = bindings or {}
    order = _topo(root)
    for node in order:
        if node.op == "var":
            if node.name in bindings:
                node.value = _as_value(bindings[node.name])
            elif node.value is None:
                raise UnboundVariableError(f"variable '{node.name}' has no binding")
    for node in order:
        if node._fwd is not None:
            node.value = node._fwd(*(p.value for p in node.parents))
            if check_finite and not np.all(np.isfinite(node.value)):
                raise NonFiniteError(f"non-finite value at {describe(node)}")
    return root.value


def backward(root, check_finite=False):
    """Reverse pass; fills ``.grad`` on every node reachable from ``root``."""
    if root.value is None:
        evaluate(root)
    order = _topo(root)
    for node in order:
        node.grad = None
    root.grad = np.ones_like(root.value)
    for node in reversed(order):
        if node.grad is None or node._bwd is None:
            continue
        if check_finite and not np.all(np.isfinite(node.grad)):
            raise NonFiniteError(f"non-finite adjoint at {describe(node)}")
        parent_grads = node._bwd(node.grad, node.value, *(p.value for p in node.parents))
        for parent, g in zip(node.parents, parent_grads):
            if g is None:
                continue
            g = _unbroadcast(g, parent.value.shape)
            parent.grad = g if parent.grad is None else parent.grad + g


def gradient(root, wrt, check_finite=True):
    """Exact reverse-mode partials of ``root`` w.r.t. the requested variables.

    ``wrt`` is a non-empty iterable of variable nodes (or their names, looked
    up in the graph).  Returns a dict keyed by variable name with an entry for
    every request, including zeros for variables the output does not depend on.
    """
    wrt = list(wrt)
    if not wrt:
        raise ValueError("gradient: 'wrt' must be non-empty")
    if root.value is None:
        evaluate(root)
    by_name = {}
    for node in _topo(root):
        if node.op == "var" and node.name is not None:
            by_name[node.name] = node
    targets = []
    for item in wrt:
        if isinstance(item, Node):
            targets.append(item)
        elif item in by_name:
            targets.append(by_name[item])
        else:
            raise UnboundVariableError(f"variable '{item}' does not appear in the graph")
    backward(root, check_finite=check_finite)
    out = {}
    for node in targets:
        g = node.grad if node.grad is not None else np.zeros_like(node.value)
        if check_finite and not np.all(np.isfinite(g)):
            raise NonFiniteError(f"non-finite adjoint at {describe(node)}")
        out[node.name] = g
    return out


# ---------------------------------------------------------------------------
# operations


def _binary(op, a, b, fwd2, bwd_a, bwd_b):
    """Build a binary op; non-Node operands are folded in as constants.

    ``bwd_a`` / ``bwd_b`` compute one parent adjoint each, so the adjoint of
    a folded constant operand is never materialized.
    """
    if isinstance(a, Node) and isinstance(b, Node):
        return Node(
            op,
            (a, b),
            fwd=fwd2,
            bwd=lambda g, v, av, bv: (bwd_a(g, v, av, bv), bwd_b(g, v, av, bv)),
        )
    if isinstance(a, Node):
        bc = _as_value(b)
        return Node(
            op,
            (a,),
            fwd=lambda av: fwd2(av, bc),
            bwd=lambda g, v, av: (bwd_a(g, v, av, bc),),
        )
    ac = _as_value(a)
    return Node(
        op,
        (b,),
        fwd=lambda bv: fwd2(ac, bv),
        bwd=lambda g, v, bv: (bwd_b(g, v, ac, bv),),
    )


def _unary(op, a, fwd1, bwd1):
    return Node(op, (a,), fwd=fwd1, bwd=lambda g, v, av: (bwd1(g, v, av),))


def add(a, b):
    if isinstance(a, Jet) or isinstance(b, Jet):
        return _jet_add(a, b)
    if not (isinstance(a, Node) or isinstance(b, Node)):
        return np.add(a, b)
    return _binary("add", a, b, lambda av, bv: av + bv,
                   lambda g, v, av, bv: g, lambda g, v, av, bv: g)


def sub(a, b):
    if isinstance(a, Jet) or isinstance(b, Jet):
        return _jet_add(a, _jet_neg(b))
    if not (isinstance(a, Node) or isinstance(b, Node)):
        return np.subtract(a, b)
    return _binary("sub", a, b, lambda av, bv: av - bv,
                   lambda g, v, av, bv: g, lambda g, v, av, bv: -g)


def mul(a, b):
    if isinstance(a, Jet) or isinstance(b, Jet):
        return _jet_mul(a, b)
    if not (isinstance(a, Node) or isinstance(b, Node)):
        return np.multiply(a, b)
    return _binary("mul", a, b, lambda av, bv: av * bv,
                   lambda g, v, av, bv: g * bv, lambda g, v, av, bv: g * av)


def div(a, b):
    if isinstance(a, Jet) or isinstance(b, Jet):
        return _jet_div(a, b)
    if not (isinstance(a, Node) or isinstance(b, Node)):
        return np.divide(a, b)
    return _binary(
        "div",
        a,
        b,
        lambda av, bv: av / bv,
        lambda g, v, av, bv: g / bv,
        lambda g, v, av, bv: -g * v / bv,
    )


def neg(a):
    if isinstance(a, Jet):
        return _jet_neg(a)
    if not isinstance(a, Node):
        return np.negative(a)
    return _unary("neg", a, lambda av: -av, lambda g, v, av: -g)


def power(a, exponent):
    """``a ** exponent`` for a constant real exponent."""
    if isinstance(exponent, (Node, Jet)):
        raise UnsupportedOperationError("pow supports constant exponents only")
    p = float(exponent)
    if isinstance(a, Jet):
        return _jet_smooth(
            a,
            lambda x: x**p,
            lambda x, v: p * x ** (p - 1.0),
            lambda x, v: p * (p - 1.0) * x ** (p - 2.0),
            op="pow",
            d3=lambda x, v: p * (p - 1.0) * (p - 2.0) * x ** (p - 3.0),
        )
    if not isinstance(a, Node):
        return np.power(a, p)
    return _unary(
        "pow",
        a,
        lambda av: av**p,
        lambda g, v, av: g * p * av ** (p - 1.0),
    )


def square(a):
    """Elementwise |a|^2 for real a."""
    if isinstance(a, Jet):
        return _jet_smooth(
            a, np.square, lambda x, v: 2.0 * x, lambda x, v: 2.0, op="square",
            d3=lambda x, v: np.zeros_like(x),
        )
    if not isinstance(a, Node):
        return np.square(a)
    return _unary("square", a, np.square, lambda g, v, av: 2.0 * g * av)


def tanh(a):
    if isinstance(a, Jet):
        return _jet_smooth(
            a,
            np.tanh,
            lambda x, v: 1.0 - v * v,
            lambda x, v: -2.0 * v * (1.0 - v * v),
            op="tanh",
            d3=lambda x, v: (6.0 * v * v - 2.0) * (1.0 - v * v),
        )
    if not isinstance(a, Node):
        return np.tanh(a)
    return _unary("tanh", a, np.tanh, lambda g, v, av: g * (1.0 - v * v))


def _sigmoid_value(x):
    # two-sided form, overflow-safe
    x = np.asarray(x, dtype=np.float64)
    z = np.exp(-np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + z), z / (1.0 + z))


def sigmoid(a):
    if isinstance(a, Jet):
        return _jet_smooth(
            a,
            _sigmoid_value,
            lambda x, v: v * (1.0 - v),
            lambda x, v: v * (1.0 - v) * (1.0 - 2.0 * v),
            op="sigmoid",
            d3=lambda x, v: v * (1.0 - v) * (1.0 - 6.0 * v + 6.0 * v * v),
        )
    if not isinstance(a, Node):
        return _sigmoid_value(a)
    return _unary("sigmoid", a, _sigmoid_value, lambda g, v, av: g * v * (1.0 - v))


def sin(a):
    if isinstance(a, Jet):
        return _jet_smooth(a, np.sin, lambda x, v: np.cos(x), lambda x, v: -v,
                           op="sin", d3=lambda x, v: -np.cos(x))
    if not isinstance(a, Node):
        return np.sin(a)
    return _unary("sin", a, np.sin, lambda g, v, av: g * np.cos(av))


def cos(a):
    if isinstance(a, Jet):
        return _jet_smooth(a, np.cos, lambda x, v: -np.sin(x), lambda x, v: -v,
                           op="cos", d3=lambda x, v: np.sin(x))
    if not isinstance(a, Node):
        return np.cos(a)
    return _unary("cos", a, np.cos, lambda g, v, av: -g * np.sin(av))


def exp(a):
    if isinstance(a, Jet):
        return _jet_smooth(a, np.exp, lambda x, v: v, lambda x, v: v, op="exp",
                           d3=lambda x, v: v)
    if not isinstance(a, Node):
        return np.exp(a)
    return _unary("exp", a, np.exp, lambda g, v, av: g * v)


def matmul(a, b):
    if isinstance(a, Jet):
        return _jet_matmul(a, b)
    if not (isinstance(a, Node) or isinstance(b, Node)):
        return np.matmul(a, b)
    return _binary(
        "matmul",
        a,
        b,
        np.matmul,
        lambda g, v, av, bv: g @ bv.T,
        lambda g, v, av, bv: av.T @ g,
    )


def sum_all(a):
    """Sum of all elements (fixed left-to-right numpy reduction)."""
    if not isinstance(a, Node):
        return np.sum(a)

    def bwd(g, v, av):
        return (np.full(av.shape, float(g)),)

    return Node("sum", (a,), fwd=np.sum, bwd=bwd)


def mean_all(a):
    if not isinstance(a, Node):
        return np.mean(a)

    def bwd(g, v, av):
        return (np.full(av.shape, float(g) / av.size),)

    return Node("mean", (a,), fwd=np.mean, bwd=bwd)


def slice_cols(a, start, stop):
    """Column slice ``a[:, start:stop]`` of a 2-d node."""
    if isinstance(a, Jet):
        return Jet(
            slice_cols(a.val, start, stop),
            None if a.dx is None else slice_cols(a.dx, start, stop),
            None if a.dxx is None else slice_cols(a.dxx, start, stop),
            None if a.dt is None else slice_cols(a.dt, start, stop),
        )
    if not isinstance(a, Node):
        return np.asarray(a)[:, start:stop]

    def bwd(g, v, av):
        out = np.zeros_like(av)
        out[:, start:stop] = g
        return (out,)

    return Node("slice", (a,), fwd=lambda av: av[:, start:stop], bwd=bwd)


# ---------------------------------------------------------------------------
# jets: nested input derivatives


class Jet:
    """Truncated Taylor object (value, d/dx, d2/dx2, d/dt).

    Components are graph nodes or plain arrays; ``None`` marks a slot that is
    not being tracked.  Arithmetic follows the usual jet chain rules, so a
    forward map written with the ops above can be fed jets and every output
    component remains differentiable with respect to the map's parameters.
    """

    __slots__ = ("val", "dx", "dxx", "dt")
    __array_ufunc__ = None

    def __init__(self, val, dx=None, dxx=None, dt=None):
        self.val = val
        self.dx = dx
        self.dxx = dxx
        self.dt = dt

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, exponent):
        return power(self, exponent)

    def __matmul__(self, other):
        return matmul(self, other)

    def __abs__(self):
        raise UnsupportedOperationError("abs is not supported in jet forward maps")


def _as_jet(x):
    return x if isinstance(x, Jet) else Jet(x)


def _zadd(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return add(a, b)


def _zmul(a, b):
    if a is None or b is None:
        return None
    return mul(a, b)


def _jet_neg(a):
    if not isinstance(a, Jet):
        return neg(a)
    return Jet(
        neg(a.val),
        None if a.dx is None else neg(a.dx),
        None if a.dxx is None else neg(a.dxx),
        None if a.dt is None else neg(a.dt),
    )


def _jet_add(a, b):
    a, b = _as_jet(a), _as_jet(b)
    return Jet(add(a.val, b.val), _zadd(a.dx, b.dx), _zadd(a.dxx, b.dxx), _zadd(a.dt, b.dt))


def _jet_mul(a, b):
    a, b = _as_jet(a), _as_jet(b)
    val = mul(a.val, b.val)
    dx = _zadd(_zmul(a.dx, b.val), _zmul(a.val, b.dx))
    dxx = _zadd(
        _zadd(_zmul(a.dxx, b.val), _zmul(a.val, b.dxx)),
        None if (a.dx is None or b.dx is None) else mul(2.0, mul(a.dx, b.dx)),
    )
    dt = _zadd(_zmul(a.dt, b.val), _zmul(a.val, b.dt))
    return Jet(val, dx, dxx, dt)


def _jet_div(a, b):
    a, b = _as_jet(a), _as_jet(b)
    val = div(a.val, b.val)
    dx = None
    if a.dx is not None or b.dx is not None:
        num = _zadd(a.dx, None if b.dx is None else neg(mul(val, b.dx)))
        dx = None if num is None else div(num, b.val)
    dxx = None
    if a.dxx is not None or b.dxx is not None or (dx is not None and b.dx is not None):
        num = a.dxx
        if dx is not None and b.dx is not None:
            num = _zadd(num, neg(mul(2.0, mul(dx, b.dx))))
        if b.dxx is not None:
            num = _zadd(num, neg(mul(val, b.dxx)))
        dxx = None if num is None else div(num, b.val)
    dt = None
    if a.dt is not None or b.dt is not None:
        num = _zadd(a.dt, None if b.dt is None else neg(mul(val, b.dt)))
        dt = None if num is None else div(num, b.val)
    return Jet(val, dx, dxx, dt)


def _jet_smooth(a, f, d1, d2, op, d3=None):
    """Chain rule for an elementwise smooth function with known f', f'', f'''.

    The third derivative is needed whenever a second input derivative is
    itself differentiated again in reverse mode (training losses containing
    u_xx), since the adjoint of f''(x) is g * f'''(x).
    """
    val = _apply_smooth(a.val, f, d1, d2, d3, which=0)
    f1 = _apply_smooth(a.val, f, d1, d2, d3, which=1, val=val)
    dx = _zmul(a.dx, f1)
    dt = _zmul(a.dt, f1)
    dxx = None
    if a.dxx is not None or a.dx is not None:
        dxx = _zmul(a.dxx, f1)
        if a.dx is not None:
            f2 = _apply_smooth(a.val, f, d1, d2, d3, which=2, val=val)
            dxx = _zadd(dxx, mul(f2, square(a.dx)))
    return Jet(val, dx, dxx, dt)


def _apply_smooth(x, f, d1, d2, d3, which, val=None):
    """Primitive value / first / second derivative as graph nodes.

    Derivative nodes take the already-computed value node as a second parent
    so f(x) is never recomputed; its adjoint slot stays empty because d2/d3
    are total derivatives in x and already carry the whole chain.
    """
    if isinstance(x, Node):
        if which == 0:
            return _unary("f", x, lambda av: f(av), lambda g, v, av: g * d1(av, v))
        if which == 1:
            return Node(
                "f'",
                (x, val),
                fwd=lambda av, vv: d1(av, vv),
                bwd=lambda g, v, av, vv: (g * d2(av, vv), None),
            )
        if d3 is None:
            def bwd(g, v, av, vv):
                raise UnsupportedOperationError(
                    "third derivative required but not available for this op"
                )
        else:
            def bwd(g, v, av, vv):
                return (g * d3(av, vv), None)

        return Node("f''", (x, val), fwd=lambda av, vv: d2(av, vv), bwd=bwd)
    v = f(x)
    if which == 0:
        return v
    if which == 1:
        return d1(x, v)
    return d2(x, v)


def _jet_matmul(a, b):
    if isinstance(b, (Jet,)):
        raise UnsupportedOperationError("matmul between two jets is not supported")
    return Jet(
        matmul(a.val, b),
        None if a.dx is None else matmul(a.dx, b),
        None if a.dxx is None else matmul(a.dxx, b),
        None if a.dt is None else matmul(a.dt, b),
    )


def seed_x(x, second_order=True):
    """Jet for a spatial input column: d/dx = 1, d2/dx2 = 0, d/dt = 0."""
    x = _as_value(x)
    return Jet(x, np.ones_like(x), np.zeros_like(x) if second_order else None, None)


def seed_t(t):
    """Jet for a time input column: d/dt = 1."""
    t = _as_value(t)
    return Jet(t, None, None, np.ones_like(t))


def input_jet(forward, point, second_order=True, with_time=None):
    """Output value and input derivatives of a forward map at ``point``.

    ``point`` is ``x`` or ``(x, t)``; the forward map receives jet-seeded
    inputs and must be composed of the ops in this module (anything else
    raises :class:`UnsupportedOperationError`).  The returned jet components
    are graph nodes whenever the forward map involves graph nodes, so they can
    be differentiated further with respect to network parameters.
    """
    if isinstance(point, tuple):
        x, t = point
        if with_time is None:
            with_time = t is not None
    else:
        x, t = point, None
        if with_time is None:
            with_time = False
    xj = seed_x(x, second_order=second_order)
    if with_time:
        out = forward(xj, seed_t(t if t is not None else 0.0))
    else:
        out = forward(xj)
    if not isinstance(out, Jet):
        raise UnsupportedOperationError(
            "forward map must be built from ifpinn.autodiff ops and return a Jet"
        )
    return out
