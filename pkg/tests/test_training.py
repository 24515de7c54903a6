import dataclasses

import numpy as np
import pytest

from ifpinn import neural, training
from ifpinn.problem import get_problem
from ifpinn.training import AdamState, TrainingConfig, adam_step, collocation_grids


def _short(name, **kw):
    cfg = training.BENCHMARK_CONFIGS[name]
    return dataclasses.replace(cfg, **kw)


def test_config_validation():
    with pytest.raises(ValueError):
        TrainingConfig(w_g=-1.0)
    with pytest.raises(ValueError):
        TrainingConfig(epochs=0)
    with pytest.raises(ValueError):
        TrainingConfig(w_mm_taper=0.0)
    with pytest.raises(KeyError):
        training.default_config("unknown")


def test_benchmark_defaults():
    toy = training.default_config("toy-interval")
    assert toy.epochs == 35000 and toy.lr == 1e-3
    assert toy.w_g == 1e5 and toy.w_mm == 1.0
    bar = training.default_config("bar-1d")
    assert bar.u_hidden == (40, 40, 40, 40)
    assert bar.p_hidden == (50, 50, 50, 50, 50)
    assert bar.lr == 1e-4 and bar.n_interior == 200
    assert bar.w_u > bar.w_mm  # boundary loss holds the solution level
    assert bar.w_mm_taper < 1.0  # driving weight anneals late in training
    nl = training.default_config("nonlinear-pde")
    assert nl.u_hidden == (40, 40, 40) and nl.p_hidden == (40, 40, 40)
    assert nl.w_0 == 1e5 and nl.n_interior == 125 and nl.n_time == 50
    assert nl.w_u > nl.w_mm


def test_collocation_grid_static():
    grids = collocation_grids(get_problem("bar-1d"), _short("bar-1d", n_interior=50))
    assert grids.interior_x.shape == (50, 1)
    assert grids.interior_x[0, 0] == 0.0 and grids.interior_x[-1, 0] == 2.0
    assert grids.interior_t is None
    assert len(grids.boundary) == 2
    assert grids.initial_x is None


def test_collocation_grid_space_time():
    cfg = _short("nonlinear-pde", n_interior=10, n_time=4)
    grids = collocation_grids(get_problem("nonlinear-pde"), cfg)
    assert grids.interior_x.shape == (40, 1)
    assert grids.interior_t.shape == (40, 1)
    assert grids.initial_x.shape == (10, 1)
    assert grids.t0 == 0.0
    for (bx, bt), bc in zip(grids.boundary, get_problem("nonlinear-pde").bcs):
        assert np.all(bx == bc.location)
        assert bt.shape == (4, 1)


def test_collocation_grid_spacefree():
    grids = collocation_grids(get_problem("toy-interval"), _short("toy-interval"))
    assert grids.interior_x.shape == (1, 1)
    assert grids.interior_x[0, 0] == 1.0  # the constant network input


def test_adam_first_step():
    # with zero state the first bias-corrected step is lr * g / (|g| + eps)
    a = np.array([1.0, -2.0])
    g = np.array([0.5, -0.5])
    state = AdamState.for_params([a])
    adam_step([a], [g], state, lr=0.1)
    np.testing.assert_allclose(a, [0.9, -1.9], atol=1e-7)


def test_adam_rejects_nonfinite_gradient():
    a = np.zeros(2)
    state = AdamState.for_params([a])
    with pytest.raises(training.DivergenceError):
        adam_step([a], [np.array([np.nan, 0.0])], state, lr=0.1)


def test_network_seeds_deterministic():
    assert training.network_seeds(0) == training.network_seeds(0)
    assert training.network_seeds(0) != training.network_seeds(1)
    s_u, s_p = training.network_seeds(0)
    assert s_u != s_p


def test_init_networks_shapes():
    prob = get_problem("bar-1d")
    cfg = _short("bar-1d")
    params_u, params_p = training.init_networks(prob, cfg)
    assert params_u.specs[0].in_width == 1
    assert params_u.specs[-1].out_width == 2  # min and max branch
    assert params_p.specs[-1].out_width == 4  # two fields, two branches
    assert params_p.specs[-1].activation == "sigmoid"


def test_loss_breakdown_finite_all_benchmarks():
    for name in ("toy-interval", "bar-1d", "nonlinear-pde"):
        prob = get_problem(name)
        cfg = _short(name, n_interior=8, n_time=3 if name == "nonlinear-pde" else 1)
        grids = collocation_grids(prob, cfg)
        params_u, params_p = training.init_networks(prob, cfg)
        b = training.loss(prob, params_u, params_p, grids, cfg)
        assert np.isfinite(b.total)
        assert b.mse_g >= 0.0
        if name == "nonlinear-pde":
            assert b.mse_0 > 0.0
        if name != "toy-interval":
            assert b.mse_u > 0.0


def test_umm_is_unnormalized_sum_difference():
    prob = get_problem("toy-interval")
    cfg = _short("toy-interval")
    grids = collocation_grids(prob, cfg)
    params_u, params_p = training.init_networks(prob, cfg)
    b = training.loss(prob, params_u, params_p, grids, cfg)
    out = np.asarray(neural.forward_u(params_u, grids.interior_x))
    assert b.u_mm_min == pytest.approx(np.sum(out[:, 0]))
    assert b.u_mm_max == pytest.approx(np.sum(out[:, 1]))
    assert b.u_mm == pytest.approx(np.sum(out[:, 0]) - np.sum(out[:, 1]))


def test_short_training_is_deterministic():
    prob = get_problem("toy-interval")
    cfg = _short("toy-interval", epochs=300, log_every=100)
    b1 = training.train(prob, cfg)
    b2 = training.train(prob, cfg)
    np.testing.assert_array_equal(b1.u_min, b2.u_min)
    np.testing.assert_array_equal(b1.u_max, b2.u_max)
    for (e1, h1), (e2, h2) in zip(b1.history, b2.history):
        assert e1 == e2 and h1 == h2
    for a1, a2 in zip(b1.params_u.arrays(), b2.params_u.arrays()):
        np.testing.assert_array_equal(a1, a2)


def test_training_progresses_and_respects_box():
    prob = get_problem("toy-interval")
    cfg = _short("toy-interval", epochs=2000, log_every=500)
    bundle = training.train(prob, cfg)
    assert not bundle.diverged
    assert bundle.box_violations == 0
    first, last = bundle.history[0][1], bundle.history[-1][1]
    assert last.mse_g < first.mse_g
    assert 0.5 - 1e-9 <= bundle.fields_min[0, 0] <= 2.0 + 1e-9
    assert 0.5 - 1e-9 <= bundle.fields_max[0, 0] <= 2.0 + 1e-9


def test_w_mm_taper_changes_late_training():
    prob = get_problem("toy-interval")
    base = _short("toy-interval", epochs=500, log_every=100)
    plain = training.train(prob, base)
    tapered = training.train(prob, dataclasses.replace(base, w_mm_taper=0.01))
    # identical up to the taper point (last 20% of epochs), different after
    for (e1, h1), (e2, h2) in zip(plain.history, tapered.history):
        if e1 < 400:
            assert h1 == h2
    assert plain.u_min[0] != tapered.u_min[0]


def test_divergence_keeps_last_snapshot():
    prob = get_problem("toy-interval")
    cfg = _short("toy-interval", epochs=500, lr=1e200, log_every=50)
    bundle = training.train(prob, cfg)
    assert bundle.diverged
    assert np.all(np.isfinite(bundle.u_min))
    assert np.all(np.isfinite(bundle.params_u.arrays()[0]))


def test_callback_cadence():
    prob = get_problem("toy-interval")
    cfg = _short("toy-interval", epochs=1000, log_every=250)
    seen = []
    training.train(prob, cfg, callback=lambda e, b, pu, pp: seen.append(e))
    assert seen == [0, 250, 500, 750, 999]


def test_training_log_csv_schema(tmp_path):
    prob = get_problem("toy-interval")
    bundle = training.train(prob, _short("toy-interval", epochs=200, log_every=100))
    log = tmp_path / "log.csv"
    training.write_training_log(bundle.history, log)
    lines = log.read_text().splitlines()
    assert lines[0] == "epoch,total,mse_g,u_mm_min,u_mm_max,mse_0,mse_u"
    assert len(lines) == 1 + len(bundle.history)


def test_solution_csv_schema(tmp_path):
    prob = get_problem("toy-interval")
    bundle = training.train(prob, _short("toy-interval", epochs=200, log_every=100))
    path = tmp_path / "solution.csv"
    training.write_solution_csv(bundle, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "x,t,u_min,u_max,P1_min,P1_max"
    # full round-trip decimal formatting
    first = lines[1].split(",")
    assert float(first[2]) == bundle.u_min[0]
    assert repr(float(bundle.u_min[0])) == first[2]


def test_derivative_bc_enters_loss():
    prob = get_problem("bar-1d")
    cfg = _short("bar-1d", n_interior=10)
    grids = collocation_grids(prob, cfg)
    params_u, params_p = training.init_networks(prob, cfg)
    b = training.loss(prob, params_u, params_p, grids, cfg)
    assert b.mse_u > 0.0
