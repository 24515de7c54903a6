"""End-to-end acceptance gates for the benchmark suite.

Each criterion prints a single PASS/FAIL line with the measured numbers.  The
bar and nonlinear benchmarks run at desk scale here (reduced epoch counts with
a relaxed bracketing tolerance); the full-length variants are marked ``slow``
and deselected by default.
"""

import dataclasses
import time

import numpy as np
import pytest

from ifpinn import gradcheck, neural, oracle, training
from ifpinn.fuzzy_driver import DEFAULT_SCHEDULE, run_fpinn
from ifpinn.problem import (
    BAR_END_LOAD,
    TOY_FUZZY_INPUT,
    get_fuzzy_problem,
    get_problem,
)
from ifpinn.uncertainty import alpha_level_optimize

# bundles from every training run in this module, audited for box violations
_RUNS = []


def _report(num, name, ok, detail):
    status = "PASS" if ok else "FAIL"
    print(f"\n[criterion {num}] {name}: {status} ({detail})")
    assert ok, f"criterion {num} ({name}): {detail}"


def _config(name, **overrides):
    cfg = training.default_config(name)
    return dataclasses.replace(cfg, **overrides) if overrides else cfg


# ---------------------------------------------------------------------------
# training fixtures (shared across criteria)


@pytest.fixture(scope="module")
def toy_run():
    t0 = time.perf_counter()
    bundle = training.train(get_problem("toy-interval"), _config("toy-interval"))
    elapsed = time.perf_counter() - t0
    _RUNS.append(("toy-interval", bundle))
    return bundle, elapsed


@pytest.fixture(scope="module")
def fuzzy_sol():
    t0 = time.perf_counter()
    sol = run_fpinn(
        get_fuzzy_problem("toy-fuzzy"), DEFAULT_SCHEDULE, _config("toy-fuzzy"), jobs=2
    )
    elapsed = time.perf_counter() - t0
    for alpha, bundle in sol.bundles.items():
        _RUNS.append((f"toy-fuzzy a={alpha}", bundle))
    return sol, elapsed


@pytest.fixture(scope="module")
def bar_desk():
    t0 = time.perf_counter()
    bundle = training.train(get_problem("bar-1d"), _config("bar-1d", epochs=100000))
    elapsed = time.perf_counter() - t0
    _RUNS.append(("bar-1d desk", bundle))
    return bundle, elapsed


@pytest.fixture(scope="module")
def nl_desk():
    t0 = time.perf_counter()
    bundle = training.train(
        get_problem("nonlinear-pde"), _config("nonlinear-pde", epochs=30000, log_every=500)
    )
    elapsed = time.perf_counter() - t0
    _RUNS.append(("nonlinear-pde desk", bundle))
    return bundle, elapsed


def _realized_field_fn(params_p, fields, col, t_value=None):
    """Scalar-signature wrapper around the trained field network column."""

    def fn(x, t=None):
        x = np.asarray(x, dtype=float).reshape(-1, 1)
        if t_value is not None:
            t = np.full_like(x, t_value)
        elif t is not None:
            t = np.asarray(t, dtype=float).reshape(-1, 1)
        head = neural.forward_field(params_p, x, t, fields)
        return np.asarray(head.cols[col]).ravel()

    return fn


def _bar_fem_curves(bundle):
    """Four endpoint-combination FEM solutions on the collocation nodes."""
    prob = get_problem("bar-1d")
    mesh = oracle.FemMesh(bundle.x)
    load = lambda x: np.cos(3.0 * x) * x
    curves = {}
    for label, e_fn, a_fn in oracle.endpoint_combinations(prob):
        curves[label] = oracle.fem_solve_bar(e_fn, a_fn, load, BAR_END_LOAD, mesh)
    return prob, mesh, load, curves


def _bar_check(bundle, eps_frac, resolve_frac):
    prob, mesh, load, curves = _bar_fem_curves(bundle)
    stack = np.stack(list(curves.values()))
    fem_range = float(stack.max() - stack.min())
    eps = eps_frac * fem_range
    lower_env = stack.min(axis=0)
    upper_env = stack.max(axis=0)
    bracket_ok = bool(
        np.all(bundle.u_min <= lower_env + eps) and np.all(bundle.u_max >= upper_env - eps)
    )

    # FEM re-solves driven by the realized fields of each branch
    resolve_err = 0.0
    for branch, u_net in ((0, bundle.u_min), (1, bundle.u_max)):
        e_fn = _realized_field_fn(bundle.params_p, prob.fields, 0 + branch)
        a_fn = _realized_field_fn(bundle.params_p, prob.fields, 2 + branch)
        u_fem = oracle.fem_solve_bar(e_fn, a_fn, load, BAR_END_LOAD, mesh)
        resolve_err = max(resolve_err, float(np.max(np.abs(u_fem - u_net))))
    resolve_ok = resolve_err <= resolve_frac * fem_range
    detail = (
        f"range={fem_range:.4f} eps={eps:.4f} "
        f"min_slack={float(np.max(bundle.u_min - lower_env)):.4f} "
        f"max_slack={float(np.max(upper_env - bundle.u_max)):.4f} "
        f"resolve_err={resolve_err:.4f} (limit {resolve_frac * fem_range:.4f})"
    )
    return bracket_ok and resolve_ok, detail


# ---------------------------------------------------------------------------
# criteria


def test_criterion_1_toy_interval_recovery(toy_run):
    bundle, elapsed = toy_run
    u_min = float(bundle.u_min[0])
    u_max = float(bundle.u_max[0])
    p_min = float(bundle.fields_min[0, 0])
    p_max = float(bundle.fields_max[0, 0])
    ok = (
        -0.02 <= u_min <= 0.02
        and 0.98 <= u_max <= 1.02
        and 1.95 <= p_min <= 2.0 + 1e-9
        and 0.95 <= p_max <= 1.05
        and elapsed <= 300.0
    )
    _report(
        1,
        "toy interval recovery",
        ok,
        f"u_min={u_min:.4f} u_max={u_max:.4f} "
        f"p_min={p_min:.4f} p_max={p_max:.4f} {elapsed:.0f}s",
    )


def test_criterion_2_fuzzy_cuts_vs_oracle(fuzzy_sol):
    sol, elapsed = fuzzy_sol
    reference = alpha_level_optimize(
        lambda p: p * (2.0 - p), [TOY_FUZZY_INPUT], DEFAULT_SCHEDULE.levels, grid=4001
    )
    worst = 0.0
    for alpha in DEFAULT_SCHEDULE.levels:
        lo_net, up_net = sol.intervals[alpha]
        ref = reference[alpha]
        worst = max(
            worst,
            abs(float(lo_net[0]) - ref.lower),
            abs(float(up_net[0]) - ref.upper),
        )
    degenerate = sol.intervals[1.0]
    deg_ok = (
        abs(float(degenerate[0][0]) - 1.0) <= 0.02
        and abs(float(degenerate[1][0]) - 1.0) <= 0.02
    )
    ok = worst <= 0.02 and deg_ok and not sol.failures and elapsed <= 1500.0
    _report(
        2,
        "fuzzy toy across cuts",
        ok,
        f"worst_endpoint_err={worst:.4f} alpha1=({float(degenerate[0][0]):.4f}, "
        f"{float(degenerate[1][0]):.4f}) {elapsed:.0f}s",
    )


def test_criterion_3_bar_bracketing_desk(bar_desk):
    bundle, elapsed = bar_desk
    ok, detail = _bar_check(bundle, eps_frac=0.05, resolve_frac=0.01)
    ok = ok and not bundle.diverged and elapsed <= 3600.0
    _report(3, "bar bracketing (desk scale)", ok, f"{detail} {elapsed:.0f}s")


@pytest.mark.slow
def test_criterion_3_bar_bracketing_full():
    t0 = time.perf_counter()
    bundle = training.train(get_problem("bar-1d"), _config("bar-1d"))
    elapsed = time.perf_counter() - t0
    _RUNS.append(("bar-1d full", bundle))
    ok, detail = _bar_check(bundle, eps_frac=0.02, resolve_frac=0.01)
    _report(3, "bar bracketing (full length)", ok and not bundle.diverged,
            f"{detail} {elapsed:.0f}s")


def test_criterion_4_nonlinear_convergence_desk(nl_desk):
    # the gate is a threshold crossing: each loss term must fall below the
    # target at some logged epoch within the budget (the min/max driving term
    # keeps spreading the branches afterwards, which can lift the residual
    # again while the realized fields reorganize)
    bundle, elapsed = nl_desk
    best_g = min(b.mse_g for _, b in bundle.history)
    best_0 = min(b.mse_0 for _, b in bundle.history)
    ok = (
        best_g < 1e-3 and best_0 < 1e-3 and not bundle.diverged and elapsed <= 2700.0
    )
    _report(
        4,
        "nonlinear residual convergence (desk scale)",
        ok,
        f"min mse_g={best_g:.2e} min mse_0={best_0:.2e} {elapsed:.0f}s",
    )


@pytest.mark.slow
def test_criterion_4_nonlinear_convergence_full():
    t0 = time.perf_counter()
    bundle = training.train(get_problem("nonlinear-pde"), _config("nonlinear-pde"))
    elapsed = time.perf_counter() - t0
    _RUNS.append(("nonlinear-pde full", bundle))
    best_g = min(b.mse_g for _, b in bundle.history)
    best_0 = min(b.mse_0 for _, b in bundle.history)
    ok = best_g < 1e-4 and best_0 < 1e-4 and not bundle.diverged
    _report(
        4,
        "nonlinear residual convergence (full length)",
        ok,
        f"min mse_g={best_g:.2e} min mse_0={best_0:.2e} {elapsed:.0f}s",
    )


def test_criterion_5_bound_vs_realization(nl_desk):
    bundle, _ = nl_desk
    prob = get_problem("nonlinear-pde")
    t_star = 0.7

    fd_lower = oracle.fd_solve_nonlinear(
        lambda x, t: 0.5 * np.sin(3.0 * x) * np.cos(t)
    )
    k_hat = _realized_field_fn(bundle.params_p, prob.fields, 0)
    fd_realized = oracle.fd_solve_nonlinear(k_hat)

    x = fd_lower.x
    out = np.asarray(
        neural.forward_u(bundle.params_u, x.reshape(-1, 1), np.full((x.size, 1), t_star))
    )
    u_min_net = out[:, 0]
    lower_slice = fd_lower.at_time(t_star)
    realized_slice = fd_realized.at_time(t_star)

    stack = np.concatenate([u_min_net, lower_slice, realized_slice])
    sol_range = float(stack.max() - stack.min())
    tol = 0.05 * sol_range
    frac_differs = float(np.mean(np.abs(lower_slice - u_min_net) > tol))
    frac_matches = float(np.mean(np.abs(realized_slice - u_min_net) <= tol))
    ok = frac_differs >= 0.10 and frac_matches >= 0.90
    _report(
        5,
        "nonlinear bound vs realization",
        ok,
        f"range={sol_range:.3f} differs(k_lower)={frac_differs:.0%} "
        f"matches(k_realized)={frac_matches:.0%}",
    )


def test_criterion_6_autodiff_suite():
    t0 = time.perf_counter()
    results = gradcheck.run_all(n_graphs=100)
    elapsed = time.perf_counter() - t0
    ok = all(r.passed for r in results) and elapsed <= 30.0
    detail = " ".join(
        f"{r.name.split()[0]}={r.max_rel_err:.2e}(<{r.tolerance:.0e})" for r in results
    )
    _report(6, "autodiff derivative suite", ok, f"{detail} {elapsed:.1f}s")


def test_criterion_7_fem_convergence():
    t0 = time.perf_counter()
    err_coarse, err_fine, ratio = oracle.fem_convergence_ratio(n_coarse=100)
    elapsed = time.perf_counter() - t0
    ok = 3.2 <= ratio <= 4.8 and elapsed <= 10.0
    _report(
        7,
        "FEM oracle convergence",
        ok,
        f"err100={err_coarse:.2e} err200={err_fine:.2e} ratio={ratio:.3f} "
        f"{elapsed:.1f}s",
    )


def test_criterion_8_box_constraint_invariant(toy_run, fuzzy_sol, bar_desk, nl_desk):
    violations = {name: bundle.box_violations for name, bundle in _RUNS}
    total = sum(violations.values())
    _report(
        8,
        "box-constraint invariant",
        total == 0,
        f"{len(_RUNS)} runs audited, {total} violations",
    )


def test_criterion_9_determinism(toy_run, tmp_path):
    bundle_a, _ = toy_run
    bundle_b = training.train(get_problem("toy-interval"), _config("toy-interval"))
    path_a = tmp_path / "a.csv"
    path_b = tmp_path / "b.csv"
    training.write_solution_csv(bundle_a, path_a)
    training.write_solution_csv(bundle_b, path_b)
    identical = path_a.read_bytes() == path_b.read_bytes()
    _report(
        9,
        "seeded determinism",
        identical,
        f"{path_a.stat().st_size} bytes, bit-identical={identical}",
    )
