"""Finite-difference verification suites for the autodiff engine.

Used both by the test suite and the ``check`` CLI command.  Random smooth
expression trees are compared against central differences; jets are compared
against first/second central differences of the same scalar map.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import autodiff as ad

# test hook: added to every computed gradient before comparison, so a fault
# injection can prove the checks actually fail on wrong gradients
_GRADIENT_PERTURBATION = 0.0

_UNARY = ("tanh", "sigmoid", "sin", "cos", "softexp", "square", "neg")
_BINARY = ("add", "sub", "mul", "safediv")


def _random_tree(rng, depth, symbols):
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.75:
            return ("sym", symbols[rng.integers(len(symbols))])
        return ("const", float(rng.uniform(-1.5, 1.5)))
    if rng.random() < 0.5:
        op = _UNARY[rng.integers(len(_UNARY))]
        return (op, _random_tree(rng, depth - 1, symbols))
    op = _BINARY[rng.integers(len(_BINARY))]
    return (op, _random_tree(rng, depth - 1, symbols), _random_tree(rng, depth - 1, symbols))


def _eval_tree(tree, env):
    op = tree[0]
    if op == "sym":
        return env[tree[1]]
    if op == "const":
        return tree[1]
    a = _eval_tree(tree[1], env)
    if op == "tanh":
        return ad.tanh(a)
    if op == "sigmoid":
        return ad.sigmoid(a)
    if op == "sin":
        return ad.sin(a)
    if op == "cos":
        return ad.cos(a)
    if op == "softexp":
        # damped exponential keeps random compositions in a sane range
        return ad.exp(0.25 * ad.tanh(a))
    if op == "square":
        return ad.square(a)
    if op == "neg":
        return ad.neg(a)
    b = _eval_tree(tree[2], env)
    if op == "add":
        return ad.add(a, b)
    if op == "sub":
        return ad.sub(a, b)
    if op == "mul":
        return ad.mul(a, b)
    if op == "safediv":
        return ad.div(a, 1.5 + ad.square(b))
    raise ValueError(f"unknown op {op}")


def _rel_err(got, want):
    return abs(got - want) / max(1.0, abs(want))


@dataclass
class CheckResult:
    name: str
    n_cases: int
    max_rel_err: float
    tolerance: float

    @property
    def passed(self):
        return self.max_rel_err < self.tolerance


def check_first_order(n_graphs=100, seed=1234, h=1e-5, tolerance=1e-6):
    """Reverse-mode gradients of random graphs vs central differences."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_graphs):
        n_sym = int(rng.integers(2, 5))
        symbols = [f"v{i}" for i in range(n_sym)]
        tree = _random_tree(rng, depth=4, symbols=symbols)
        point = {s: float(rng.uniform(-2.0, 2.0)) for s in symbols}
        nodes = {s: ad.variable(s, point[s]) for s in symbols}
        root = _eval_tree(tree, nodes)
        if not isinstance(root, ad.Node):
            continue
        if abs(float(root.value)) > 50.0:
            # huge values make the FD reference itself roundoff-limited
            continue
        grads = ad.gradient(root, list(nodes.values()))
        for s in symbols:
            lo = dict(point, **{s: point[s] - h})
            hi = dict(point, **{s: point[s] + h})
            fd = (float(_eval_tree(tree, hi)) - float(_eval_tree(tree, lo))) / (2 * h)
            got = float(grads[s]) + _GRADIENT_PERTURBATION
            worst = max(worst, _rel_err(got, fd))
    return CheckResult("first-order gradients", n_graphs, worst, tolerance)


def _scalar_map(tree):
    def f(x):
        return _eval_tree(tree, {"x": x})

    return f


def check_jet_derivatives(n_graphs=100, seed=4321, h1=1e-4, h2=1e-3, tolerance=1e-5):
    """Jet-propagated d/dx and d2/dx2 vs first/second central differences."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_graphs):
        tree = _random_tree(rng, depth=4, symbols=["x"])
        x0 = float(rng.uniform(-2.0, 2.0))
        f = _scalar_map(tree)
        try:
            jet = ad.input_jet(f, np.array([[x0]]))
        except ad.UnsupportedOperationError:
            continue  # the random tree collapsed to a constant
        if abs(np.asarray(ad.evaluate(jet.val)).ravel()[0]) > 50.0:
            continue
        val = lambda x: np.asarray(ad.evaluate(f(np.array([[x]])))).ravel()[0]
        fd1 = (val(x0 + h1) - val(x0 - h1)) / (2 * h1)
        fd2 = (val(x0 + h2) - 2 * val(x0) + val(x0 - h2)) / h2**2
        dx = np.asarray(ad.evaluate(jet.dx)).ravel()[0] + _GRADIENT_PERTURBATION
        dxx = np.asarray(ad.evaluate(jet.dxx)).ravel()[0] + _GRADIENT_PERTURBATION
        worst = max(worst, _rel_err(dx, fd1), _rel_err(dxx, fd2))
    return CheckResult("jet input derivatives", n_graphs, worst, tolerance)


def run_all(n_graphs=100):
    return [check_first_order(n_graphs=n_graphs), check_jet_derivatives(n_graphs=n_graphs)]
