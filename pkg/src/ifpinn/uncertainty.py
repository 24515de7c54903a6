"""Interval and fuzzy numbers/fields, alpha-cuts, and brute-force
alpha-level optimization.

The optimizer here is deliberately naive (dense grid search over the cut
intervals); it serves as the independent oracle that the trained networks are
checked against.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Interval:
    lower: float
    upper: float

    def __post_init__(self):
        if not (self.lower <= self.upper):
            raise ValueError(f"invalid interval [{self.lower}, {self.upper}]")

    @property
    def width(self):
        return self.upper - self.lower

    def contains(self, x, tol=0.0):
        x = np.asarray(x)
        return np.all((x >= self.lower - tol) & (x <= self.upper + tol))

    def grid(self, resolution):
        return np.linspace(self.lower, self.upper, resolution)


@dataclass(frozen=True)
class IntervalField:
    """Closed-form lower/upper bound functions of (x, t).

    Bound callables take ``(x, t)`` with ``t=None`` for static fields.  They
    must be written with the dispatch ops in :mod:`ifpinn.autodiff` if they are
    to be threaded through jets (spatially varying bounds in residuals).
    """

    lower: object
    upper: object
    name: str = "P"

    def at(self, x, t=None):
        lo = np.broadcast_to(np.asarray(self.lower(x, t), dtype=float), np.shape(x))
        up = np.broadcast_to(np.asarray(self.upper(x, t), dtype=float), np.shape(x))
        return lo, up

    def validate(self, x_domain, t_domain=None, samples=512):
        """Dense-sampling check that lower <= upper on the declared domain."""
        xs = np.linspace(x_domain[0], x_domain[1], samples)
        if t_domain is None:
            grids = [(xs, None)]
        else:
            ts = np.linspace(t_domain[0], t_domain[1], samples)
            xg, tg = np.meshgrid(xs, ts, indexing="ij")
            grids = [(xg.ravel(), tg.ravel())]
        for xg, tg in grids:
            lo, up = self.at(xg, tg)
            if np.any(up < lo):
                bad = np.argmax(up < lo)
                raise ValueError(
                    f"interval field '{self.name}': upper < lower near sample {bad}"
                )
        return True


def constant_field(lower, upper, name="P"):
    lo, up = float(lower), float(upper)
    if up < lo:
        raise ValueError(f"invalid constant field [{lo}, {up}]")
    return IntervalField(lambda x, t=None: lo, lambda x, t=None: up, name=name)


@dataclass(frozen=True)
class FuzzyNumber:
    """Convex fuzzy number with a triangular, trapezoidal, or Gaussian
    membership function.

    Parameters by kind:
      triangular:  (left, peak, right)
      trapezoidal: (left, plateau_left, plateau_right, right)
      gaussian:    (mean, width) with support truncated at mean +- trunc*width
    """

    kind: str
    params: tuple
    trunc: float = 3.0

    def __post_init__(self):
        p = self.params
        if self.kind == "triangular":
            if len(p) != 3 or not (p[0] <= p[1] <= p[2]) or p[0] == p[2]:
                raise ValueError(f"bad triangular parameters {p}")
        elif self.kind == "trapezoidal":
            if len(p) != 4 or not (p[0] <= p[1] <= p[2] <= p[3]) or p[0] == p[3]:
                raise ValueError(f"bad trapezoidal parameters {p}")
        elif self.kind == "gaussian":
            if len(p) != 2 or p[1] <= 0:
                raise ValueError(f"bad gaussian parameters {p}")
            if self.trunc <= 0:
                raise ValueError("gaussian support truncation must be positive")
        else:
            raise ValueError(f"unknown membership kind '{self.kind}'")

    def membership(self, x):
        x = np.asarray(x, dtype=float)
        p = self.params
        if self.kind == "triangular":
            a, b, c = p
            left = (x - a) / (b - a) if b > a else (x >= b).astype(float)
            right = (c - x) / (c - b) if c > b else (x <= b).astype(float)
            mu = np.minimum(left, right)
        elif self.kind == "trapezoidal":
            a, b, c, d = p
            left = (x - a) / (b - a) if b > a else (x >= b).astype(float)
            right = (d - x) / (d - c) if d > c else (x <= c).astype(float)
            mu = np.minimum(np.minimum(left, 1.0), right)
        else:
            m, s = p
            mu = np.exp(-0.5 * ((x - m) / s) ** 2)
            mu = np.where(np.abs(x - m) > self.trunc * s, 0.0, mu)
        return np.clip(mu, 0.0, 1.0)

    def alpha_cut(self, alpha):
        """Closed interval {x : mu(x) >= alpha}; alpha=0 gives the support closure."""
        if not 0.0 <= alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {alpha}")
        p = self.params
        if self.kind == "triangular":
            a, b, c = p
            return Interval(a + alpha * (b - a), c - alpha * (c - b))
        if self.kind == "trapezoidal":
            a, b, c, d = p
            return Interval(a + alpha * (b - a), d - alpha * (d - c))
        m, s = p
        if alpha <= 0.0:
            half = self.trunc * s
        else:
            half = min(s * np.sqrt(-2.0 * np.log(alpha)) if alpha < 1.0 else 0.0,
                       self.trunc * s)
        return Interval(m - half, m + half)

    @property
    def peak(self):
        cut = self.alpha_cut(1.0)
        return 0.5 * (cut.lower + cut.upper)


@dataclass(frozen=True)
class FuzzyField:
    """Membership-parameterized field family; every alpha-cut is an
    IntervalField.

    ``cut_fn`` maps an alpha level to the bound-function pair for that level.
    """

    cut_fn: object
    name: str = "F"

    def cut(self, alpha):
        fld = self.cut_fn(alpha)
        if not isinstance(fld, IntervalField):
            raise TypeError("cut_fn must return an IntervalField")
        return fld

    def check_nesting(self, levels, x_domain, t_domain=None, samples=128):
        """Assert cuts are nested: higher alpha lies inside lower alpha."""
        xs = np.linspace(x_domain[0], x_domain[1], samples)
        ts = None
        if t_domain is not None:
            ts = np.full_like(xs, 0.5 * (t_domain[0] + t_domain[1]))
        prev = None
        for alpha in sorted(levels):
            lo, up = self.cut(alpha).at(xs, ts)
            if prev is not None:
                plo, pup = prev
                if np.any(lo < plo - 1e-12) or np.any(up > pup + 1e-12):
                    raise ValueError(f"fuzzy field '{self.name}': cuts not nested at alpha={alpha}")
            prev = (lo, up)
        return True


def alpha_level_optimize(f, inputs, levels, grid=1001):
    """Brute-force output bounds of ``f`` over the alpha-cuts of its inputs.

    For each level, ``f`` is evaluated on the Cartesian grid of the input cut
    intervals and the min/max are returned as an :class:`Interval`.  This is
    the oracle the fuzzy network driver is verified against.
    """
    if grid < 2:
        raise ValueError("grid resolution must be >= 2")
    out = {}
    for alpha in levels:
        axes = [fn.alpha_cut(alpha).grid(grid) for fn in inputs]
        mesh = np.meshgrid(*axes, indexing="ij") if len(axes) > 1 else [axes[0]]
        vals = np.asarray(f(*mesh), dtype=float)
        if not np.all(np.isfinite(vals)):
            bad = np.unravel_index(int(np.argmin(np.isfinite(vals))), vals.shape)
            point = tuple(float(m[bad]) for m in mesh)
            raise FloatingPointError(f"non-finite objective value at grid point {point}")
        out[alpha] = Interval(float(np.min(vals)), float(np.max(vals)))
    return out
