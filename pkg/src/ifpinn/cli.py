"""Command-line front end: train benchmarks, run oracles, verify gradients,
and export plot-ready CSV data.

Exit codes: 0 success, 2 configuration error, 3 training divergence,
4 verification failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import platform
import sys

import numpy as np
import yaml

from . import __version__, expressions, neural, oracle, training
from .fuzzy_driver import AlphaSchedule, DEFAULT_SCHEDULE, run_fpinn
from .problem import (
    BUILTIN_FUZZY,
    BUILTIN_PROBLEMS,
    BoundaryCondition,
    FuzzyProblem,
    ProblemDefinition,
    get_fuzzy_problem,
    get_problem,
)
from .training import BENCHMARK_CONFIGS, TrainingConfig
from .uncertainty import FuzzyNumber, IntervalField, constant_field

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGED = 3
EXIT_CHECK = 4


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# config file handling


_TOP_KEYS = {"problem", "custom", "output", "alpha_levels", "jobs",
             "training", "networks", "versions", "command"}
_TRAINING_KEYS = {"epochs", "lr", "w_g", "w_mm", "w_0", "w_u", "n_interior",
                  "n_time", "seed", "log_every", "normalize_umm",
                  "snapshot_every", "w_mm_taper"}
_NETWORK_KEYS = {"u_hidden", "p_hidden"}
_CUSTOM_KEYS = {"name", "x_domain", "t_domain", "constant_input", "fields",
                "residual", "bcs", "ic"}
_FIELD_KEYS = {"name", "lower", "upper", "kind", "params"}
_BC_KEYS = {"location", "kind", "target"}


def _check_keys(mapping, allowed, where):
    if not isinstance(mapping, dict):
        raise ConfigError(f"{where}: expected a mapping, got {type(mapping).__name__}")
    unknown = sorted(set(mapping) - allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(unknown)}")


def load_config(path):
    """Parse and schema-validate a YAML/JSON run configuration file."""
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    if raw is None:
        raw = {}
    _check_keys(raw, _TOP_KEYS, path)
    if "training" in raw:
        _check_keys(raw["training"], _TRAINING_KEYS, f"{path}: training")
    if "networks" in raw:
        _check_keys(raw["networks"], _NETWORK_KEYS, f"{path}: networks")
    if "custom" in raw:
        _validate_custom(raw["custom"], f"{path}: custom")
    if "problem" in raw and "custom" in raw:
        raise ConfigError(f"{path}: 'problem' and 'custom' are mutually exclusive")
    if "alpha_levels" in raw:
        levels = raw["alpha_levels"]
        if not isinstance(levels, (list, tuple)) or not levels:
            raise ConfigError(f"{path}: alpha_levels must be a non-empty list")
    return raw


def _validate_custom(custom, where):
    _check_keys(custom, _CUSTOM_KEYS, where)
    for key in ("name", "fields", "residual"):
        if key not in custom:
            raise ConfigError(f"{where}: missing required key '{key}'")
    if not isinstance(custom["fields"], list) or not custom["fields"]:
        raise ConfigError(f"{where}: fields must be a non-empty list")
    for i, fld in enumerate(custom["fields"]):
        _check_keys(fld, _FIELD_KEYS, f"{where}: fields[{i}]")
        interval = "lower" in fld and "upper" in fld
        fuzzy = "kind" in fld and "params" in fld
        if interval == fuzzy:
            raise ConfigError(
                f"{where}: fields[{i}] needs either lower/upper expressions "
                "or a fuzzy kind/params pair"
            )
    if not isinstance(custom["residual"], list) or not custom["residual"]:
        raise ConfigError(f"{where}: residual must be a non-empty list of expressions")
    for i, bc in enumerate(custom.get("bcs", [])):
        _check_keys(bc, _BC_KEYS, f"{where}: bcs[{i}]")
        for key in _BC_KEYS:
            if key not in bc:
                raise ConfigError(f"{where}: bcs[{i}] missing '{key}'")
        if bc["kind"] not in ("value", "derivative"):
            raise ConfigError(f"{where}: bcs[{i}] kind must be value or derivative")


def _domain_pair(value, where):
    if value is None:
        return None
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(f"{where}: expected [low, high]")
    lo, hi = float(value[0]), float(value[1])
    if hi <= lo:
        raise ConfigError(f"{where}: domain must be increasing, got [{lo}, {hi}]")
    return (lo, hi)


# ---------------------------------------------------------------------------
# custom problems from expression strings


def _compile_bound(text, spatial, temporal, where):
    symbols = set()
    if spatial:
        symbols.add("x")
    if temporal:
        symbols.add("t")
    try:
        return expressions.compile_expression(str(text), symbols)
    except expressions.ExpressionError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _bound_callable(fn):
    return lambda x, t=None: fn({"x": x, "t": t})


def build_custom_problem(custom):
    """Turn the validated ``custom`` config section into a problem object.

    Returns a :class:`ProblemDefinition`, or a :class:`FuzzyProblem` when any
    field is given as a fuzzy membership instead of interval bounds.
    """
    where = f"custom problem '{custom['name']}'"
    x_domain = _domain_pair(custom.get("x_domain"), f"{where}: x_domain")
    t_domain = _domain_pair(custom.get("t_domain"), f"{where}: t_domain")
    if t_domain is not None and x_domain is None:
        raise ConfigError(f"{where}: t_domain requires an x_domain")
    spatial = x_domain is not None
    n_fields = len(custom["fields"])

    field_makers = []  # cut-interval list -> IntervalField; None cut for interval fields
    fuzzy_inputs = []
    for i, fld in enumerate(custom["fields"]):
        name = fld.get("name", f"P{i + 1}")
        if "kind" in fld:
            fuzzy_inputs.append(FuzzyNumber(fld["kind"], tuple(fld["params"])))
            field_makers.append(
                lambda cut, name=name: constant_field(cut.lower, cut.upper, name=name)
            )
        else:
            lo = _compile_bound(fld["lower"], spatial, t_domain is not None,
                                f"{where}: fields[{i}].lower")
            up = _compile_bound(fld["upper"], spatial, t_domain is not None,
                                f"{where}: fields[{i}].upper")
            made = IntervalField(_bound_callable(lo), _bound_callable(up), name=name)
            field_makers.append(lambda cut, made=made: made)

    res_symbols = {"x", "u", "u_x", "u_xx", "u_t"}
    if t_domain is not None:
        res_symbols.add("t")
    res_symbols |= {f"P{i + 1}" for i in range(n_fields)}
    res_fns = []
    for i, text in enumerate(custom["residual"]):
        try:
            res_fns.append(expressions.compile_expression(str(text), res_symbols))
        except expressions.ExpressionError as exc:
            raise ConfigError(f"{where}: residual[{i}]: {exc}") from exc
    needs = frozenset(
        k for k in ("u_x", "u_xx", "u_t")
        if any(k in fn.free_symbols for fn in res_fns)
    )
    if t_domain is None and any("u_t" in fn.free_symbols for fn in res_fns):
        raise ConfigError(f"{where}: residual uses u_t but no t_domain is given")

    def residual_fn(x, t, s):
        env = {"x": x, "t": t, "u": s.u, "u_x": s.u_x, "u_xx": s.u_xx, "u_t": s.u_t}
        for i, p in enumerate(s.P):
            env[f"P{i + 1}"] = p
        return [fn(env) for fn in res_fns]

    bc_symbols = {"t"} if t_domain is not None else set()
    bc_symbols |= {f"P{i + 1}" for i in range(n_fields)}
    bcs = []
    for i, bc in enumerate(custom.get("bcs", [])):
        try:
            target_fn = expressions.compile_expression(str(bc["target"]), bc_symbols)
        except expressions.ExpressionError as exc:
            raise ConfigError(f"{where}: bcs[{i}].target: {exc}") from exc

        def target(t, p, fn=target_fn):
            env = {"t": t}
            for j, v in enumerate(p):
                env[f"P{j + 1}"] = v
            return fn(env)

        bcs.append(BoundaryCondition(float(bc["location"]), bc["kind"], target))
    if bcs and not spatial:
        raise ConfigError(f"{where}: boundary conditions require an x_domain")

    ic = None
    if custom.get("ic") is not None:
        if t_domain is None:
            raise ConfigError(f"{where}: an initial condition requires a t_domain")
        ic_fn = _compile_bound(custom["ic"], spatial, False, f"{where}: ic")
        ic = lambda x: ic_fn({"x": x})

    def make(cuts):
        cut_iter = iter(cuts)
        fields = tuple(
            maker(next(cut_iter) if i in fuzzy_positions else None)
            for i, maker in enumerate(field_makers)
        )
        return ProblemDefinition(
            name=custom["name"],
            h=1,
            fields=fields,
            residual_fn=residual_fn,
            needs=needs,
            x_domain=x_domain,
            t_domain=t_domain,
            bcs=tuple(bcs),
            ic=ic,
            n_residual=len(res_fns),
            constant_input=float(custom.get("constant_input", 1.0)),
        )

    fuzzy_positions = {
        i for i, fld in enumerate(custom["fields"]) if "kind" in fld
    }
    if fuzzy_inputs:
        return FuzzyProblem(custom["name"], tuple(fuzzy_inputs), make)
    return make([])


# ---------------------------------------------------------------------------
# config resolution


def _resolve_training(problem_name, config, args):
    base = BENCHMARK_CONFIGS.get(problem_name, TrainingConfig())
    values = dataclasses.asdict(base)
    for key, val in (config.get("training") or {}).items():
        values[key] = val
    for key, val in (config.get("networks") or {}).items():
        values[key] = tuple(int(w) for w in val)
    overrides = {
        "epochs": args.epochs, "lr": args.lr, "w_g": args.wg, "w_mm": args.wmm,
        "w_0": args.w0, "w_u": args.wu, "w_mm_taper": args.wmm_taper,
        "seed": args.seed, "log_every": args.log_every,
    }
    for key, val in overrides.items():
        if val is not None:
            values[key] = val
    for key in ("epochs", "n_interior", "n_time", "seed", "log_every",
                "snapshot_every"):
        values[key] = int(values[key])
    for key in ("lr", "w_g", "w_mm", "w_0", "w_u", "w_mm_taper"):
        values[key] = float(values[key])
    values["u_hidden"] = tuple(int(w) for w in values["u_hidden"])
    values["p_hidden"] = tuple(int(w) for w in values["p_hidden"])
    try:
        return TrainingConfig(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid training settings: {exc}") from exc


def _resolve_levels(config, args):
    if args.alpha_levels is not None:
        try:
            levels = tuple(float(a) for a in args.alpha_levels.split(","))
        except ValueError as exc:
            raise ConfigError(f"bad --alpha-levels value: {exc}") from exc
    elif config.get("alpha_levels") is not None:
        levels = tuple(float(a) for a in config["alpha_levels"])
    else:
        return DEFAULT_SCHEDULE
    try:
        return AlphaSchedule(levels)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _metadata(problem_name, custom, out_dir, cfg, schedule, jobs, command):
    data = {
        "problem": problem_name if custom is None else None,
        "output": out_dir,
        "jobs": jobs,
        "training": {
            k: v for k, v in dataclasses.asdict(cfg).items()
            if k not in ("u_hidden", "p_hidden")
        },
        "networks": {
            "u_hidden": list(cfg.u_hidden),
            "p_hidden": list(cfg.p_hidden),
        },
        "versions": {
            "ifpinn": __version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
        },
        "command": command,
    }
    if custom is not None:
        data["custom"] = custom
    if schedule is not None:
        data["alpha_levels"] = list(schedule.levels)
    return data


# ---------------------------------------------------------------------------
# run command


def _write_bundle(bundle, out_dir, cfg):
    os.makedirs(out_dir, exist_ok=True)
    training.write_solution_csv(bundle, os.path.join(out_dir, "solution.csv"))
    training.write_training_log(bundle.history, os.path.join(out_dir, "training_log.csv"))
    neural.save_params(bundle.params_u, os.path.join(out_dir, "params_u.json"))
    neural.save_params(bundle.params_p, os.path.join(out_dir, "params_p.json"))


def _snapshot_callback(out_dir, cfg):
    if cfg.snapshot_every <= 0:
        return None
    snap_dir = os.path.join(out_dir, "snapshots")
    os.makedirs(snap_dir, exist_ok=True)

    def callback(epoch, breakdown, params_u, params_p):
        if epoch % cfg.snapshot_every == 0:
            neural.save_params(params_u, os.path.join(snap_dir, f"epoch_{epoch:08d}_u.json"))
            neural.save_params(params_p, os.path.join(snap_dir, f"epoch_{epoch:08d}_p.json"))

    return callback


def cmd_run(args):
    config = load_config(args.config) if args.config else {}
    custom = config.get("custom")
    problem_name = args.problem or config.get("problem")
    if custom is not None and args.problem:
        raise ConfigError("--problem cannot override an inline custom problem")
    if custom is None and problem_name is None:
        raise ConfigError("no problem given: use --problem or a config file")

    if custom is not None:
        prob = build_custom_problem(custom)
        problem_name = custom["name"]
    elif problem_name in BUILTIN_FUZZY:
        prob = get_fuzzy_problem(problem_name)
    elif problem_name in BUILTIN_PROBLEMS:
        prob = get_problem(problem_name)
    else:
        raise ConfigError(f"unknown problem '{problem_name}'")

    cfg = _resolve_training(problem_name, config, args)
    jobs = args.jobs if args.jobs is not None else int(config.get("jobs", 1))
    out_dir = args.out or config.get("output") or os.path.join("runs", problem_name)
    os.makedirs(out_dir, exist_ok=True)

    is_fuzzy = isinstance(prob, FuzzyProblem)
    schedule = _resolve_levels(config, args) if is_fuzzy else None
    meta = _metadata(problem_name, custom, out_dir, cfg, schedule, jobs,
                     command="run")
    with open(os.path.join(out_dir, "run_metadata.json"), "w") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")

    if is_fuzzy:
        sol = run_fpinn(prob, schedule, cfg, jobs=jobs)
        rows = []
        for alpha in schedule.levels:
            sub = os.path.join(out_dir, f"alpha_{alpha:.2f}")
            _write_bundle(sol.bundles[alpha], sub, cfg)
            u_min, u_max = sol.intervals[alpha]
            rows.append((alpha, float(u_min[0]), float(u_max[0]),
                         os.path.join(f"alpha_{alpha:.2f}", "solution.csv")))
        with open(os.path.join(out_dir, "fuzzy.csv"), "w") as fh:
            fh.write("alpha,lower,upper,bundle\n")
            for alpha, lo, up, link in rows:
                fh.write(f"{repr(float(alpha))},{repr(lo)},{repr(up)},{link}\n")
        for warning in sol.nesting_warnings:
            print(f"warning: {warning}", file=sys.stderr)
        if sol.failures:
            for alpha, reason in sorted(sol.failures.items()):
                print(f"alpha={alpha}: {reason}", file=sys.stderr)
            return EXIT_DIVERGED
        print(f"wrote {len(schedule.levels)} alpha-cut runs to {out_dir}")
        return EXIT_OK

    bundle = training.train(prob, cfg, callback=_snapshot_callback(out_dir, cfg))
    _write_bundle(bundle, out_dir, cfg)
    if bundle.diverged:
        print("training diverged; partial artifacts retained", file=sys.stderr)
        return EXIT_DIVERGED
    final = bundle.history[-1][1] if bundle.history else None
    if final is not None:
        print(f"final loss {final.total:.6g} (mse_g {final.mse_g:.6g})")
    print(f"wrote artifacts to {out_dir}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# oracle command


def _write_rows(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join("" if v is None else repr(float(v)) for v in row) + "\n")


def cmd_oracle(args):
    out_dir = args.out or os.path.join("runs", "oracle", args.problem)
    name = args.problem
    if name not in BUILTIN_PROBLEMS and name not in BUILTIN_FUZZY:
        print(f"unknown problem '{name}'", file=sys.stderr)
        return EXIT_CONFIG
    os.makedirs(out_dir, exist_ok=True)

    if name == "toy-interval":
        from .uncertainty import Interval

        vmin, amin, vmax, amax = oracle.grid_search_extrema(
            lambda p: p * (2.0 - p), Interval(0.5, 2.0), args.resolution
        )
        with open(os.path.join(out_dir, "extrema.csv"), "w") as fh:
            fh.write("quantity,value,argument\n")
            fh.write(f"min,{repr(float(vmin))},{repr(float(amin))}\n")
            fh.write(f"max,{repr(float(vmax))},{repr(float(amax))}\n")
        print(f"min {vmin:.6g} at p={amin:.6g}; max {vmax:.6g} at p={amax:.6g}")
    elif name == "toy-fuzzy":
        from .problem import TOY_FUZZY_INPUT
        from .uncertainty import alpha_level_optimize

        levels = DEFAULT_SCHEDULE.levels
        if args.alpha_levels:
            levels = tuple(float(a) for a in args.alpha_levels.split(","))
        out = alpha_level_optimize(
            lambda p: p * (2.0 - p), [TOY_FUZZY_INPUT], levels, grid=args.resolution
        )
        _write_rows(
            os.path.join(out_dir, "fuzzy_oracle.csv"),
            ["alpha", "lower", "upper"],
            [(a, out[a].lower, out[a].upper) for a in levels],
        )
        for a in levels:
            print(f"alpha={a:.2f}: [{out[a].lower:.6g}, {out[a].upper:.6g}]")
    elif name == "bar-1d":
        prob = get_problem("bar-1d")
        mesh = oracle.uniform_mesh(2.0, args.elements)
        load_fn = lambda x: np.cos(3.0 * x) * x
        for label, e_fn, a_fn in oracle.endpoint_combinations(prob):
            u = oracle.fem_solve_bar(e_fn, a_fn, load_fn, 0.1, mesh)
            _write_rows(
                os.path.join(out_dir, f"oracle_{label}.csv"),
                ["x", "t", "u"],
                [(x, None, v) for x, v in zip(mesh.nodes, u)],
            )
        print(f"wrote 4 endpoint-combination curves to {out_dir}")
    else:  # nonlinear-pde
        prob = get_problem("nonlinear-pde")
        fld = prob.fields[0]
        bound = fld.lower if args.k == "lower" else fld.upper
        k_fn = lambda x, t: np.asarray(bound(x, t), dtype=float)
        sol = oracle.fd_solve_nonlinear(k_fn, oracle.FdGrid(n_x=args.nx))
        keep = np.unique(np.linspace(0, sol.t.size - 1, 51).astype(int))
        rows = []
        for ti in keep:
            for xi in range(sol.x.size):
                rows.append((sol.x[xi], sol.t[ti], sol.u[ti, xi]))
        _write_rows(os.path.join(out_dir, f"fd_k_{args.k}.csv"), ["x", "t", "u"], rows)
        print(f"wrote finite-difference solution (k={args.k}) to {out_dir}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# check command


def cmd_check(args):
    from . import gradcheck

    results = gradcheck.run_all(n_graphs=args.graphs)
    coarse, fine, ratio = oracle.fem_convergence_ratio()
    fem_pass = 3.2 <= ratio <= 4.8
    ok = all(r.passed for r in results) and fem_pass
    print(f"{'suite':<28}{'cases':>7}{'max rel err':>14}{'tolerance':>12}  status")
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.name:<28}{r.n_cases:>7}{r.max_rel_err:>14.3e}{r.tolerance:>12.1e}  {status}")
    status = "PASS" if fem_pass else "FAIL"
    print(f"{'fem h-convergence ratio':<28}{2:>7}{ratio:>14.3f}{'[3.2,4.8]':>12}  {status}")
    if not ok:
        return EXIT_CHECK
    return EXIT_OK


# ---------------------------------------------------------------------------
# list-problems / export


def cmd_list_problems(args):
    for name in sorted(BUILTIN_PROBLEMS):
        print(f"{name}  (interval)")
    for name in sorted(BUILTIN_FUZZY):
        print(f"{name}  (fuzzy)")
    return EXIT_OK


def cmd_export(args):
    if args.problem not in BUILTIN_PROBLEMS:
        print(f"unknown problem '{args.problem}'", file=sys.stderr)
        return EXIT_CONFIG
    prob = get_problem(args.problem)
    base = BENCHMARK_CONFIGS.get(args.problem, TrainingConfig())
    cfg = dataclasses.replace(
        base,
        n_interior=args.n_interior or base.n_interior,
        n_time=args.n_time or base.n_time,
    )
    try:
        params_u = neural.load_params(args.params_u)
        params_p = neural.load_params(args.params_p)
    except (OSError, ValueError) as exc:
        print(f"cannot load parameters: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    grids = training.collocation_grids(prob, cfg)
    bundle = training._bundle(prob, cfg, grids, params_u, params_p,
                              history=[], diverged=False, box_violations=0)
    training.write_solution_csv(bundle, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ifpinn",
        description="Interval/fuzzy physics-informed neural network solver.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="train a problem and write artifacts")
    run.add_argument("--config", help="YAML/JSON run configuration file")
    run.add_argument("--problem", help="built-in problem name")
    run.add_argument("--epochs", type=int)
    run.add_argument("--lr", type=float)
    run.add_argument("--wg", type=float)
    run.add_argument("--wmm", type=float)
    run.add_argument("--w0", type=float)
    run.add_argument("--wu", type=float)
    run.add_argument("--wmm-taper", type=float, dest="wmm_taper")
    run.add_argument("--seed", type=int)
    run.add_argument("--jobs", type=int)
    run.add_argument("--log-every", type=int, dest="log_every")
    run.add_argument("--alpha-levels", dest="alpha_levels",
                     help="comma-separated alpha levels for fuzzy runs")
    run.add_argument("--out", help="output directory")
    run.set_defaults(func=cmd_run)

    orc = sub.add_parser("oracle", help="run a reference solver")
    orc.add_argument("problem")
    orc.add_argument("--out", help="output directory")
    orc.add_argument("--resolution", type=int, default=15001,
                     help="grid resolution for brute-force searches")
    orc.add_argument("--alpha-levels", dest="alpha_levels",
                     help="comma-separated alpha levels (toy-fuzzy)")
    orc.add_argument("--combinations", action="store_true",
                     help="emit the four endpoint-combination curves (bar-1d)")
    orc.add_argument("--elements", type=int, default=1000,
                     help="finite element count (bar-1d)")
    orc.add_argument("--k", choices=("lower", "upper"), default="lower",
                     help="which reaction-field bound to use (nonlinear-pde)")
    orc.add_argument("--nx", type=int, default=201,
                     help="spatial node count (nonlinear-pde)")
    orc.set_defaults(func=cmd_oracle)

    chk = sub.add_parser("check", help="verify gradients and the FEM solver")
    chk.add_argument("--graphs", type=int, default=100,
                     help="random graphs per derivative suite")
    chk.set_defaults(func=cmd_check)

    lst = sub.add_parser("list-problems", help="list built-in problems")
    lst.set_defaults(func=cmd_list_problems)

    exp = sub.add_parser("export", help="evaluate saved parameters to CSV")
    exp.add_argument("--problem", required=True)
    exp.add_argument("--params-u", required=True, dest="params_u")
    exp.add_argument("--params-p", required=True, dest="params_p")
    exp.add_argument("--out", required=True)
    exp.add_argument("--n-interior", type=int, dest="n_interior")
    exp.add_argument("--n-time", type=int, dest="n_time")
    exp.set_defaults(func=cmd_export)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
