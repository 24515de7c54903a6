import numpy as np
import pytest

from ifpinn import problem as pm
from ifpinn.problem import BranchState, residual


def _state(**kw):
    kw.setdefault("branch", "min")
    return BranchState(**kw)


def test_registry_names():
    assert set(pm.BUILTIN_PROBLEMS) == {"toy-interval", "bar-1d", "nonlinear-pde"}
    assert set(pm.BUILTIN_FUZZY) == {"toy-fuzzy"}
    with pytest.raises(KeyError):
        pm.get_problem("no-such-problem")
    with pytest.raises(KeyError):
        pm.get_fuzzy_problem("toy-interval")


def test_toy_residual_zero_at_solution():
    prob = pm.get_problem("toy-interval")
    p = np.array([[1.5]])
    u = p * (2.0 - p)
    state = _state(u=u, P=[p])
    out = residual(prob, state, np.array([[1.0]]))
    np.testing.assert_allclose(np.asarray(out[0]), 0.0)
    assert prob.x_domain is None and prob.input_width == 1


def test_toy_extrema_values():
    # max of p(2-p) over [0.5, 2] is 1 at p=1; min is 0 at p=2
    p = np.linspace(0.5, 2.0, 30001)
    vals = p * (2.0 - p)
    assert vals.max() == pytest.approx(1.0, abs=1e-8)
    assert p[vals.argmax()] == pytest.approx(1.0, abs=1e-4)
    assert vals.min() == pytest.approx(0.0, abs=1e-12)
    assert p[vals.argmin()] == pytest.approx(2.0)


def test_contract_missing_derivative():
    prob = pm.get_problem("bar-1d")
    state = _state(u=np.zeros((3, 1)), P=[np.ones((3, 1)), np.ones((3, 1))])
    with pytest.raises(pm.ContractError, match="u_x"):
        residual(prob, state, np.zeros((3, 1)))


def test_contract_missing_field_derivative():
    prob = pm.get_problem("bar-1d")
    z = np.zeros((3, 1))
    state = _state(u=z, u_x=z, u_xx=z, P=[np.ones((3, 1)), np.ones((3, 1))])
    with pytest.raises(pm.ContractError, match="P_x"):
        residual(prob, state, z)


def test_contract_field_count():
    prob = pm.get_problem("toy-interval")
    state = _state(u=np.zeros((1, 1)), P=[])
    with pytest.raises(pm.ContractError, match="field values"):
        residual(prob, state, np.ones((1, 1)))


def test_bar_residual_matches_expanded_operator():
    prob = pm.get_problem("bar-1d")
    x = np.linspace(0.1, 1.9, 7).reshape(-1, 1)
    # manufactured smooth branch data evaluated with plain arrays
    u_x = np.cos(x)
    u_xx = -np.sin(x)
    e = 0.5 * np.sin(x) + 0.55
    a = np.cos(3.0 * x) + 2.0
    e_x = 0.5 * np.cos(x)
    a_x = -3.0 * np.sin(3.0 * x)
    state = _state(u=np.sin(x), u_x=u_x, u_xx=u_xx, P=[e, a], P_x=[e_x, a_x])
    out = residual(prob, state, x)
    expected = (e_x * a + e * a_x) * u_x + e * a * u_xx + np.cos(3.0 * x) * x
    np.testing.assert_allclose(np.asarray(out[0]), expected)


def test_bar_boundary_conditions():
    prob = pm.get_problem("bar-1d")
    left, right = prob.bcs
    assert left.kind == "value" and left.location == 0.0
    assert left.target(None, [1.0, 1.0]) == 0.0
    assert right.kind == "derivative" and right.location == 2.0
    # traction condition divides the end load by the branch stiffness
    assert float(right.target(None, [0.8, 2.5])) == pytest.approx(0.1 / (0.8 * 2.5))


def test_bar_field_bounds():
    prob = pm.get_problem("bar-1d")
    assert prob.validate_fields()
    e, a = prob.fields
    x = np.array([[0.0]])
    lo, up = e.at(x)
    assert lo.item() == pytest.approx(0.55)
    assert up.item() == pytest.approx(1.4)
    lo, up = a.at(x)
    assert lo.item() == pytest.approx(3.0)
    assert up.item() == pytest.approx(4.0)


def test_nonlinear_residual_zero_for_spatially_uniform_steady_state():
    # with u_t = u_xx = 0 the residual reduces to k u^3 - k^3, zero at u = k^(2/3)
    prob = pm.get_problem("nonlinear-pde")
    x = np.linspace(-0.5, 0.5, 5).reshape(-1, 1)
    t = np.full_like(x, 0.3)
    k = np.full_like(x, 1.2)
    z = np.zeros_like(x)
    state = _state(u=k ** (2.0 / 3.0), u_xx=z, u_t=z, P=[k])
    out = residual(prob, state, x, t)
    np.testing.assert_allclose(np.asarray(out[0]), 0.0, atol=1e-12)


def test_nonlinear_problem_shape():
    prob = pm.get_problem("nonlinear-pde")
    assert prob.t_domain == (0.0, 1.0)
    assert prob.input_width == 2
    np.testing.assert_allclose(prob.ic(np.array([0.0, 1.0])), [1.0, 0.0])
    assert {bc.location for bc in prob.bcs} == {-1.0, 1.0}
    assert prob.validate_fields()


def test_boundary_condition_kind_validation():
    with pytest.raises(ValueError):
        pm.BoundaryCondition(0.0, "flux", lambda t, p: 0.0)


def test_fuzzy_cut_produces_interval_problem():
    fz = pm.get_fuzzy_problem("toy-fuzzy")
    cut = fz.cut(0.5)
    lo, up = cut.fields[0].at(np.zeros((1, 1)))
    assert lo.item() == pytest.approx(0.75)
    assert up.item() == pytest.approx(1.5)
    degenerate = fz.cut(1.0)
    lo, up = degenerate.fields[0].at(np.zeros((1, 1)))
    assert lo.item() == up.item() == pytest.approx(1.0)
