"""Declarative PDE problem container and the built-in benchmark problems.

A problem bundles the residual operator, the domain, boundary/initial
conditions, and the interval fields entering the operator.  Residuals are
written against the dispatch ops in :mod:`ifpinn.autodiff`, so the same
definition is usable with plain arrays (oracles) and with graph nodes/jets
(training).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import autodiff as ad
from .uncertainty import FuzzyNumber, IntervalField, constant_field

DERIVATIVE_KEYS = ("u_x", "u_xx", "u_t", "P_x")


class ContractError(RuntimeError):
    """A residual asked for a derivative the caller did not populate."""


@dataclass(frozen=True)
class BoundaryCondition:
    """Condition at a domain boundary point.

    ``target(t, P)`` may depend on the branch's realized field values at the
    boundary (e.g. a traction condition dividing by stiffness), so it is
    evaluated per branch.
    """

    location: float
    kind: str  # "value" | "derivative"
    target: object

    def __post_init__(self):
        if self.kind not in ("value", "derivative"):
            raise ValueError(f"unknown boundary condition kind '{self.kind}'")


@dataclass
class BranchState:
    """Solution and realized-field values for one extremal branch."""

    branch: str  # "min" | "max"
    u: object
    u_x: object = None
    u_xx: object = None
    u_t: object = None
    P: list = field(default_factory=list)
    P_x: list = field(default_factory=list)


@dataclass(frozen=True)
class ProblemDefinition:
    name: str
    h: int
    fields: tuple
    residual_fn: object
    needs: frozenset
    x_domain: tuple | None = None
    t_domain: tuple | None = None
    bcs: tuple = ()
    ic: object = None
    n_residual: int = 1
    # space-free problems feed this constant to the networks instead of x
    constant_input: float = 1.0

    @property
    def s(self):
        return len(self.fields)

    @property
    def input_width(self):
        return 2 if self.t_domain is not None else 1

    def validate_fields(self, samples=512):
        if self.x_domain is None:
            return True
        for fld in self.fields:
            fld.validate(self.x_domain, self.t_domain, samples=samples)
        return True


def residual(problem, state, x, t=None):
    """Residual vector (length N_G) for one branch at the given points."""
    for key in DERIVATIVE_KEYS:
        if key not in problem.needs:
            continue
        if key == "P_x":
            if not state.P_x:
                raise ContractError(f"{problem.name}: residual needs field derivatives P_x")
        elif getattr(state, key) is None:
            raise ContractError(f"{problem.name}: residual needs derivative '{key}'")
    if len(state.P) != problem.s:
        raise ContractError(
            f"{problem.name}: expected {problem.s} field values, got {len(state.P)}"
        )
    out = problem.residual_fn(x, t, state)
    if len(out) != problem.n_residual:
        raise ContractError(
            f"{problem.name}: residual returned {len(out)} components, "
            f"declared {problem.n_residual}"
        )
    return out


# ---------------------------------------------------------------------------
# built-in benchmarks


def builtin_toy_interval():
    """Space/time-free map u = p (2 - p) with the parameter p in [0.5, 2].

    The non-monotone dependence makes the output extrema sit at an interior
    parameter value (max at p=1) rather than at the endpoints.
    """

    def g(x, t, s):
        p = s.P[0]
        return [s.u - p * (2.0 - p)]

    return ProblemDefinition(
        name="toy-interval",
        h=1,
        fields=(constant_field(0.5, 2.0, name="p"),),
        residual_fn=g,
        needs=frozenset(),
    )


TOY_FUZZY_INPUT = FuzzyNumber("triangular", (0.5, 1.0, 2.0))


@dataclass(frozen=True)
class FuzzyProblem:
    """A problem whose uncertain inputs are fuzzy; each alpha-cut yields an
    ordinary interval problem."""

    name: str
    fuzzy_inputs: tuple
    make_cut_problem: object

    def cut(self, alpha):
        cuts = [fn.alpha_cut(alpha) for fn in self.fuzzy_inputs]
        return self.make_cut_problem(cuts)


def builtin_toy_fuzzy():
    def make(cuts):
        cut = cuts[0]

        def g(x, t, s):
            p = s.P[0]
            return [s.u - p * (2.0 - p)]

        return ProblemDefinition(
            name="toy-fuzzy",
            h=1,
            fields=(constant_field(cut.lower, cut.upper, name="p"),),
            residual_fn=g,
            needs=frozenset(),
        )

    return FuzzyProblem("toy-fuzzy", (TOY_FUZZY_INPUT,), make)


BAR_LENGTH = 2.0
BAR_END_LOAD = 0.1


def bar_load(x):
    return ad.cos(3.0 * x) * x


def builtin_bar_1d():
    """Static bar (E A u')' + n = 0 on [0, 2] with interval stiffness and area.

    The divergence form is expanded by the product rule, so the residual uses
    the spatial derivatives of the realized fields: (E' A + E A') u' + E A u''
    + n(x).  Left end is clamped; the right end carries the load-derived
    Neumann condition u'(L) = P / (E(L) A(L)) evaluated with the branch's own
    realized fields.
    """
    e_field = IntervalField(
        lambda x, t=None: 0.5 * ad.sin(x) + 0.55,
        lambda x, t=None: 0.4 * ad.sin(2.0 * x) + 1.4,
        name="E",
    )
    a_field = IntervalField(
        lambda x, t=None: ad.cos(3.0 * x) + 2.0,
        lambda x, t=None: ad.cos(3.8 * x) + 3.0,
        name="A",
    )

    def g(x, t, s):
        e, a = s.P
        ex, axx = s.P_x
        return [(ex * a + e * axx) * s.u_x + e * a * s.u_xx + bar_load(x)]

    bcs = (
        BoundaryCondition(0.0, "value", lambda t, p: 0.0),
        BoundaryCondition(
            BAR_LENGTH, "derivative", lambda t, p: BAR_END_LOAD / (p[0] * p[1])
        ),
    )
    return ProblemDefinition(
        name="bar-1d",
        h=1,
        fields=(e_field, a_field),
        residual_fn=g,
        needs=frozenset({"u_x", "u_xx", "P_x"}),
        x_domain=(0.0, BAR_LENGTH),
        bcs=bcs,
    )


def builtin_nonlinear_pde():
    """u_t = 0.01 u u_xx - k u^3 + k^3 on x in [-1, 1], t in [0, 1].

    Homogeneous Dirichlet ends, parabolic initial profile, and a space-time
    interval reaction field k.
    """
    k_field = IntervalField(
        lambda x, t: 0.5 * ad.sin(3.0 * x) * ad.cos(t),
        lambda x, t: ad.sin(3.0 * x) * ad.cos(t) * ad.cos(t) + 3.0,
        name="k",
    )

    def g(x, t, s):
        k = s.P[0]
        return [s.u_t - 0.01 * s.u * s.u_xx + k * (s.u**3) - k**3]

    bcs = (
        BoundaryCondition(-1.0, "value", lambda t, p: 0.0),
        BoundaryCondition(1.0, "value", lambda t, p: 0.0),
    )
    return ProblemDefinition(
        name="nonlinear-pde",
        h=1,
        fields=(k_field,),
        residual_fn=g,
        needs=frozenset({"u_xx", "u_t"}),
        x_domain=(-1.0, 1.0),
        t_domain=(0.0, 1.0),
        bcs=bcs,
        ic=lambda x: 1.0 - x**2,
    )


BUILTIN_PROBLEMS = {
    "toy-interval": builtin_toy_interval,
    "bar-1d": builtin_bar_1d,
    "nonlinear-pde": builtin_nonlinear_pde,
}

BUILTIN_FUZZY = {
    "toy-fuzzy": builtin_toy_fuzzy,
}


def get_problem(name):
    if name in BUILTIN_PROBLEMS:
        return BUILTIN_PROBLEMS[name]()
    raise KeyError(f"unknown problem '{name}'")


def get_fuzzy_problem(name):
    if name in BUILTIN_FUZZY:
        return BUILTIN_FUZZY[name]()
    raise KeyError(f"unknown fuzzy problem '{name}'")
