"""Independent reference solvers used to verify the trained networks.

None of these share code with the training path: the bar gets a textbook
Galerkin FEM with linear elements, the nonlinear PDE a method-of-lines finite
difference integrator, and the algebraic toy problems a brute-force grid
search.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solveh_banded

# 2-point Gauss rule on [-1, 1]
_GAUSS_XI = np.array([-1.0, 1.0]) / np.sqrt(3.0)


@dataclass(frozen=True)
class FemMesh:
    nodes: np.ndarray  # strictly increasing, covering [0, L]

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2 or np.any(np.diff(nodes) <= 0):
            raise ValueError("mesh nodes must be strictly increasing")
        object.__setattr__(self, "nodes", nodes)

    @property
    def n_elements(self):
        return self.nodes.size - 1


def uniform_mesh(length, n_elements):
    return FemMesh(np.linspace(0.0, length, n_elements + 1))


def fem_solve_bar(e_fn, a_fn, n_fn, end_load, mesh):
    """Linear-element Galerkin solution of (E A u')' + n = 0 on [0, L].

    Clamped at x=0; the end load enters as a point force at the last node.
    Element integrals use 2-point Gauss quadrature, which keeps the O(h^2)
    convergence for the smoothly varying coefficients used here.
    """
    nodes = mesh.nodes
    n_el = mesh.n_elements
    n_nodes = nodes.size
    diag = np.zeros(n_nodes)
    off = np.zeros(n_nodes - 1)
    load = np.zeros(n_nodes)
    for e in range(n_el):
        x0, x1 = nodes[e], nodes[e + 1]
        h = x1 - x0
        xg = 0.5 * (x0 + x1) + 0.5 * h * _GAUSS_XI
        ea = np.asarray(e_fn(xg)) * np.asarray(a_fn(xg))
        if np.any(ea <= 0.0):
            raise ValueError(f"E*A must be positive; got {ea.min()} in element {e}")
        ke = 0.5 * h * np.sum(ea) / h**2
        diag[e] += ke
        diag[e + 1] += ke
        off[e] -= ke
        ng = np.asarray(n_fn(xg))
        # linear shape functions at the Gauss points
        phi0 = 0.5 * (1.0 - _GAUSS_XI)
        phi1 = 0.5 * (1.0 + _GAUSS_XI)
        load[e] += 0.5 * h * np.sum(ng * phi0)
        load[e + 1] += 0.5 * h * np.sum(ng * phi1)
    load[-1] += end_load

    # clamp the first node, solve the remaining symmetric tridiagonal system
    ab = np.zeros((2, n_nodes - 1))
    ab[0, 1:] = off[1:]
    ab[1, :] = diag[1:]
    interior = solveh_banded(ab, load[1:])
    u = np.zeros(n_nodes)
    u[1:] = interior
    return u


def endpoint_combinations(problem):
    """The four deterministic (E, A) pairs built from the declared bounds."""
    if problem.s != 2:
        raise ValueError("endpoint combinations require exactly two interval fields")
    e_fld, a_fld = problem.fields

    def fn(fld, which):
        bound = fld.lower if which == "L" else fld.upper
        return lambda x: np.asarray(bound(x, None), dtype=float)

    combos = []
    for e_w, a_w in (("L", "L"), ("U", "L"), ("L", "U"), ("U", "U")):
        combos.append(
            (f"E{e_w}-A{a_w}", fn(e_fld, e_w), fn(a_fld, a_w))
        )
    return combos


@dataclass(frozen=True)
class FdGrid:
    """Spatial nodes on [-1, 1] plus an explicit time step up to ``t_end``."""

    n_x: int = 201
    dt: float | None = None
    t_end: float = 1.0
    u_max_estimate: float = 4.0

    def __post_init__(self):
        if self.n_x < 3:
            raise ValueError("need at least 3 spatial nodes")
        stable = 0.4 * self.dx**2 / (0.01 * self.u_max_estimate)
        if self.dt is None:
            object.__setattr__(self, "dt", stable)
        elif self.dt > stable * (1.0 + 1e-12):
            raise ValueError(
                f"time step {self.dt} violates the stability bound {stable}"
            )

    @property
    def dx(self):
        return 2.0 / (self.n_x - 1)

    @property
    def x(self):
        return np.linspace(-1.0, 1.0, self.n_x)


@dataclass
class FdSolution:
    x: np.ndarray
    t: np.ndarray
    u: np.ndarray  # (n_times, n_x)

    def at_time(self, t_query):
        idx = int(np.argmin(np.abs(self.t - t_query)))
        return self.u[idx]


def fd_solve_nonlinear(k_fn, grid=None):
    """Method-of-lines integration of u_t = 0.01 u u_xx - k u^3 + k^3.

    Second-order central differences in space, classical 4th-order explicit
    Runge-Kutta in time, Dirichlet u(+-1, t) = 0, initial profile 1 - x^2.
    """
    grid = grid or FdGrid()
    x = grid.x
    dx2 = grid.dx**2
    u = 1.0 - x**2
    u[0] = u[-1] = 0.0
    xi = x[1:-1]

    def rhs(u_now, t_now):
        k = np.asarray(k_fn(xi, np.full_like(xi, t_now)), dtype=float)
        uxx = (u_now[2:] - 2.0 * u_now[1:-1] + u_now[:-2]) / dx2
        du = np.zeros_like(u_now)
        du[1:-1] = 0.01 * u_now[1:-1] * uxx - k * u_now[1:-1] ** 3 + k**3
        return du

    n_steps = int(np.ceil(grid.t_end / grid.dt - 1e-12))
    dt = grid.t_end / n_steps
    times = np.linspace(0.0, grid.t_end, n_steps + 1)
    out = np.empty((n_steps + 1, x.size))
    out[0] = u
    for step in range(n_steps):
        t_now = times[step]
        k1 = rhs(u, t_now)
        k2 = rhs(u + 0.5 * dt * k1, t_now + 0.5 * dt)
        k3 = rhs(u + 0.5 * dt * k2, t_now + 0.5 * dt)
        k4 = rhs(u + dt * k3, t_now + dt)
        u = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        u[0] = u[-1] = 0.0
        if np.max(np.abs(u)) > 1e6:
            raise FloatingPointError(f"finite-difference blow-up at t={times[step + 1]:.4f}")
        out[step + 1] = u
    return FdSolution(x=x, t=times, u=out)


def fem_convergence_ratio(n_coarse=100, length=2.0):
    """Manufactured-solution error ratio between meshes of n and 2n elements.

    Uses a variable stiffness E(x) = 1 + 0.5 sin(x) (constant coefficients
    would make linear elements nodally exact and hide the O(h^2) rate) with
    A = 1 and u(x) = sin(pi x / 4); the source and end load follow from
    (E u')' + n = 0.  Halving h should cut the max nodal error by about 4.
    """
    w = np.pi / 4.0

    def u_exact(x):
        return np.sin(w * x)

    e_fn = lambda x: 1.0 + 0.5 * np.sin(x)
    one = lambda x: np.ones_like(np.asarray(x, dtype=float))

    def source(x):
        # n = -(E' u' + E u'')
        return -(0.5 * np.cos(x) * w * np.cos(w * x)
                 - e_fn(x) * w**2 * np.sin(w * x))

    end_load = e_fn(length) * w * np.cos(w * length)

    errors = []
    for n_el in (n_coarse, 2 * n_coarse):
        mesh = uniform_mesh(length, n_el)
        u = fem_solve_bar(e_fn, one, source, end_load, mesh)
        errors.append(np.max(np.abs(u - u_exact(mesh.nodes))))
    return errors[0], errors[1], errors[0] / errors[1]


def grid_search_extrema(f, interval, resolution):
    """Brute-force extrema of ``f`` on an equidistant grid over ``interval``."""
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    xs = np.linspace(interval.lower, interval.upper, resolution)
    vals = np.asarray(f(xs), dtype=float)
    imin, imax = int(np.argmin(vals)), int(np.argmax(vals))
    return vals[imin], xs[imin], vals[imax], xs[imax]
