"""Fuzzy orchestration: one interval training run per alpha-cut, assembled
into an approximate output membership function."""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, field, replace

import numpy as np

from . import problem as problem_mod
from . import training


@dataclass(frozen=True)
class AlphaSchedule:
    levels: tuple

    def __post_init__(self):
        levels = tuple(float(a) for a in self.levels)
        if len(levels) < 1:
            raise ValueError("alpha schedule must contain at least one level")
        if any(not 0.0 <= a <= 1.0 for a in levels):
            raise ValueError(f"alpha levels must lie in [0, 1]: {levels}")
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise ValueError(f"alpha levels must be strictly increasing: {levels}")
        object.__setattr__(self, "levels", levels)


#: the paper's five-cut schedule for the introductory fuzzy problem
DEFAULT_SCHEDULE = AlphaSchedule((0.0, 0.25, 0.5, 0.75, 1.0))


@dataclass
class FuzzySolution:
    schedule: AlphaSchedule
    intervals: dict  # alpha -> (u_min array, u_max array) over evaluation points
    bundles: dict  # alpha -> SolutionBundle
    failures: dict = field(default_factory=dict)  # alpha -> reason
    nesting_warnings: list = field(default_factory=list)


def cut_seed(base_seed, index):
    """Deterministic per-cut seed derived from the base seed and cut index."""
    return int(np.random.SeedSequence([int(base_seed), int(index)]).generate_state(1)[0])


def _train_cut(fuzzy_problem, alpha, index, config):
    cfg = replace(config, seed=cut_seed(config.seed, index))
    cut_problem = fuzzy_problem.cut(alpha)
    return training.train(cut_problem, cfg)


def _train_builtin_cut(name, alpha, index, config):
    return alpha, _train_cut(problem_mod.get_fuzzy_problem(name), alpha, index, config)


def run_fpinn(fuzzy_problem, schedule, config, jobs=1):
    """Train a fresh interval network pair per alpha level and collect bounds.

    Each cut uses the same hyperparameters; only the bounding interval
    changes.  A diverging cut is recorded as a failure and the remaining cuts
    still complete.
    """
    for fn in fuzzy_problem.fuzzy_inputs:
        fn.alpha_cut(0.0)  # raises early on malformed inputs
    bundles = {}
    failures = {}
    if jobs > 1 and fuzzy_problem.name in problem_mod.BUILTIN_FUZZY:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [
                pool.submit(_train_builtin_cut, fuzzy_problem.name, alpha, i, config)
                for i, alpha in enumerate(schedule.levels)
            ]
            for fut in futures:
                alpha, bundle = fut.result()
                bundles[alpha] = bundle
    else:
        for i, alpha in enumerate(schedule.levels):
            bundles[alpha] = _train_cut(fuzzy_problem, alpha, i, config)

    intervals = {}
    for alpha, bundle in bundles.items():
        if bundle.diverged:
            failures[alpha] = "training diverged; last finite snapshot retained"
        intervals[alpha] = (bundle.u_min.copy(), bundle.u_max.copy())

    sol = FuzzySolution(schedule, intervals, bundles, failures)
    _check_nesting(sol)
    return sol


_NESTING_TOL = 0.02


def _check_nesting(sol, tol=_NESTING_TOL):
    """Flag (not reject) output cuts that fail to nest beyond tolerance."""
    levels = sorted(sol.intervals)
    for lo_a, hi_a in zip(levels, levels[1:]):
        lo_min, lo_max = sol.intervals[lo_a]
        hi_min, hi_max = sol.intervals[hi_a]
        if np.any(hi_min < lo_min - tol) or np.any(hi_max > lo_max + tol):
            sol.nesting_warnings.append(
                f"cut at alpha={hi_a} exceeds the cut at alpha={lo_a} by more than {tol}"
            )


def assemble_membership(sol, point=0):
    """Piecewise-linear output membership through the per-cut endpoints.

    Left endpoints are traversed with ascending alpha, right endpoints with
    descending alpha.  Returns (values, memberships) arrays suitable for
    direct plotting.  Interpolation between cuts is linear.
    """
    levels = sorted(sol.intervals)
    if len(levels) < 2:
        raise ValueError("membership assembly needs at least two alpha levels")
    lows = [float(sol.intervals[a][0][point]) for a in levels]
    highs = [float(sol.intervals[a][1][point]) for a in levels]
    values = np.array(lows + highs[::-1])
    mus = np.array(levels + levels[::-1])
    return values, mus
