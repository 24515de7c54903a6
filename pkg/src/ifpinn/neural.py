"""Feedforward networks for the solution bounds and the realized input fields.

Two independent nets are used: the solution net has an identity head and
outputs ``[u_1^min, u_1^max, ..., u_h^min, u_h^max]``; the field net has a
sigmoid head whose raw outputs in (0, 1) are affinely rescaled into the
declared interval-field bounds, so the realized fields satisfy the box
constraint by construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import autodiff as ad

_PARAMS_FORMAT = "ifpinn-network-params"
_PARAMS_VERSION = 1

_ACTIVATIONS = ("tanh", "sigmoid", "identity")


class ShapeError(ValueError):
    pass


class InvalidBoundsError(ValueError):
    pass


@dataclass(frozen=True)
class LayerSpec:
    in_width: int
    out_width: int
    activation: str = "tanh"

    def __post_init__(self):
        if self.in_width < 1 or self.out_width < 1:
            raise ShapeError(f"layer widths must be >= 1, got {self}")
        if self.activation not in _ACTIVATIONS:
            raise ShapeError(f"unknown activation '{self.activation}'")


@dataclass
class NetworkParams:
    """Per-layer weight matrices (in_width x out_width) and bias vectors."""

    specs: list[LayerSpec]
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    @property
    def n_params(self):
        return sum(w.size for w in self.weights) + sum(b.size for b in self.biases)

    def copy(self):
        return NetworkParams(
            list(self.specs),
            [w.copy() for w in self.weights],
            [b.copy() for b in self.biases],
        )

    def arrays(self):
        """Flat list of parameter arrays in a fixed order (W1, b1, W2, b2, ...)."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.append(w)
            out.append(b)
        return out


def mlp_spec(in_width, hidden, out_width, head="identity"):
    """Specs for a tanh MLP with the given hidden widths and head activation."""
    widths = [in_width] + list(hidden) + [out_width]
    specs = []
    for k in range(len(widths) - 1):
        act = "tanh" if k < len(widths) - 2 else head
        specs.append(LayerSpec(widths[k], widths[k + 1], act))
    return specs


def init_params(specs, seed):
    """Glorot-uniform weights, zero biases; reproducible from ``seed``."""
    specs = list(specs)
    if not specs:
        raise ShapeError("network needs at least one layer")
    for prev, cur in zip(specs, specs[1:]):
        if prev.out_width != cur.in_width:
            raise ShapeError(f"layer widths do not chain: {prev} -> {cur}")
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for spec in specs:
        limit = np.sqrt(6.0 / (spec.in_width + spec.out_width))
        weights.append(rng.uniform(-limit, limit, size=(spec.in_width, spec.out_width)))
        biases.append(np.zeros(spec.out_width))
    return NetworkParams(specs, weights, biases)


def params_to_nodes(params):
    """Variable nodes for every parameter array, for building a training graph.

    Returns (layer list of (W_node, b_node), flat node list matching
    ``params.arrays()`` order).
    """
    layers, flat = [], []
    for k, (w, b) in enumerate(zip(params.weights, params.biases)):
        wn = ad.variable(f"W{k}", w)
        bn = ad.variable(f"b{k}", b)
        layers.append((wn, bn))
        flat.extend((wn, bn))
    return layers, flat


def _activate(name, z):
    if name == "tanh":
        return ad.tanh(z)
    if name == "sigmoid":
        return ad.sigmoid(z)
    return z


def mlp_forward(specs, layers, x):
    """Forward pass; ``x`` may be an array, a graph node, or a jet."""
    h = x
    for spec, (w, b) in zip(specs, layers):
        h = _activate(spec.activation, ad.matmul(h, w) + b)
    return h


def _stack_inputs(x, t):
    x = np.atleast_2d(np.asarray(x, dtype=float).reshape(-1, 1))
    if t is None:
        return x
    t = np.asarray(t, dtype=float).reshape(-1, 1)
    return np.hstack([x, t])


def input_columns(x, t=None, second_order=False, with_time_derivative=False):
    """Jet-seeded network input: value (N, d) plus input-derivative seeds."""
    val = _stack_inputs(x, t)
    n, d = val.shape
    dx = np.zeros((n, d))
    dx[:, 0] = 1.0
    dxx = np.zeros((n, d)) if second_order else None
    dt = None
    if with_time_derivative:
        if t is None:
            raise ShapeError("time derivative requested for a time-free input")
        dt = np.zeros((n, d))
        dt[:, 1] = 1.0
    return ad.Jet(val, dx, dxx, dt)


def forward_u(params, x, t=None, layers=None):
    """Solution-branch outputs ``[u_1^min, u_1^max, ...]`` at the given points."""
    if layers is None:
        layers = list(zip(params.weights, params.biases))
    out = mlp_forward(params.specs, layers, _stack_inputs(x, t))
    val = out.value if isinstance(out, ad.Node) else out
    if not np.all(np.isfinite(val)):
        raise ad.NonFiniteError("non-finite solution-network output")
    return out


@dataclass
class FieldHead:
    """Raw sigmoid outputs and the per-column rescaled field values.

    ``cols`` holds 2s entries ordered ``[P_1^min, P_1^max, ..., P_s^min,
    P_s^max]``; entries are arrays, nodes, or jets depending on the inputs.
    """

    z: object
    cols: list


def scale_to_bounds(z, x, t, bounds, derivatives=False):
    """Eq.-style affine rescaling of sigmoid outputs into the field bounds.

    Each declared bound pair is applied to two adjacent output columns (one
    per min/max branch).  Raises :class:`InvalidBoundsError` if the upper
    bound dips below the lower anywhere on the evaluation points.
    """
    cols = []
    for i, bnd in enumerate(bounds):
        if derivatives:
            xa = ad.seed_x(np.asarray(x, dtype=float).reshape(-1, 1), second_order=False)
            ta = None if t is None else ad.Jet(np.asarray(t, dtype=float).reshape(-1, 1))
        else:
            xa = np.asarray(x, dtype=float).reshape(-1, 1)
            ta = None if t is None else np.asarray(t, dtype=float).reshape(-1, 1)
        lo = bnd.lower(xa, ta)
        up = bnd.upper(xa, ta)
        lo_v = lo.val if isinstance(lo, ad.Jet) else lo
        up_v = up.val if isinstance(up, ad.Jet) else up
        if np.any(np.asarray(up_v) < np.asarray(lo_v)):
            raise InvalidBoundsError(
                f"field {i}: upper bound below lower bound at an evaluation point"
            )
        for branch in (0, 1):
            zc = ad.slice_cols(z, 2 * i + branch, 2 * i + branch + 1)
            cols.append((up - lo) * zc + lo)
    return cols


def forward_field(params, x, t, bounds, layers=None, derivatives=False):
    """Realized input fields, guaranteed inside their declared bounds.

    ``derivatives=True`` threads first-order jets through the head so the
    columns carry spatial derivatives of the realized fields as well.
    """
    if params.specs[-1].activation != "sigmoid":
        raise ShapeError("field network must have a sigmoid head")
    if params.specs[-1].out_width != 2 * len(bounds):
        raise ShapeError(
            f"field network output width {params.specs[-1].out_width} != 2 x "
            f"{len(bounds)} bound fields"
        )
    if layers is None:
        layers = list(zip(params.weights, params.biases))
    if derivatives:
        inp = input_columns(x, t, second_order=False)
    else:
        inp = _stack_inputs(x, t)
    z = mlp_forward(params.specs, layers, inp)
    cols = scale_to_bounds(z, x, t, bounds, derivatives=derivatives)
    return FieldHead(z=z, cols=cols)


def save_params(params, path):
    """Versioned structured-text snapshot (row-major weights)."""
    payload = {
        "format": _PARAMS_FORMAT,
        "version": _PARAMS_VERSION,
        "layers": [
            {
                "in": spec.in_width,
                "out": spec.out_width,
                "activation": spec.activation,
                "weights": w.tolist(),
                "bias": b.tolist(),
            }
            for spec, w, b in zip(params.specs, params.weights, params.biases)
        ],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)


def load_params(path):
    with open(path) as fh:
        payload = json.load(fh)
    if payload.get("format") != _PARAMS_FORMAT:
        raise ValueError(f"{path}: not a parameter snapshot")
    if payload.get("version") != _PARAMS_VERSION:
        raise ValueError(f"{path}: unsupported snapshot version {payload.get('version')}")
    specs, weights, biases = [], [], []
    for layer in payload["layers"]:
        specs.append(LayerSpec(layer["in"], layer["out"], layer["activation"]))
        weights.append(np.asarray(layer["weights"], dtype=float))
        biases.append(np.asarray(layer["bias"], dtype=float))
    return NetworkParams(specs, weights, biases)
