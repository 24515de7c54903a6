"""Fuzzy toy problem: propagate a triangular fuzzy input through u = p (2 - p).

The fuzzy input is decomposed into alpha-cuts; each cut is an ordinary
interval problem solved by its own network pair, and the per-cut output
intervals are stacked back into an output membership function.  A brute-force
alpha-level optimization provides the reference endpoints.

Five cuts at 35,000 iterations each (a few minutes; cuts run in parallel).
"""

import dataclasses

from ifpinn import training
from ifpinn.fuzzy_driver import DEFAULT_SCHEDULE, assemble_membership, run_fpinn
from ifpinn.problem import TOY_FUZZY_INPUT, get_fuzzy_problem
from ifpinn.uncertainty import alpha_level_optimize

fuzzy = get_fuzzy_problem("toy-fuzzy")
cfg = training.default_config("toy-fuzzy")

print(f"input: {TOY_FUZZY_INPUT.kind} {TOY_FUZZY_INPUT.params}")
print(f"alpha levels: {DEFAULT_SCHEDULE.levels}")
sol = run_fpinn(fuzzy, DEFAULT_SCHEDULE, cfg, jobs=5)

reference = alpha_level_optimize(
    lambda p: p * (2.0 - p), [TOY_FUZZY_INPUT], DEFAULT_SCHEDULE.levels, grid=4001
)

print("\nalpha     network interval        reference interval")
for alpha in DEFAULT_SCHEDULE.levels:
    lo, up = sol.intervals[alpha]
    ref = reference[alpha]
    print(
        f"{alpha:>5.2f}   [{lo[0]:+.4f}, {up[0]:+.4f}]   "
        f"[{ref.lower:+.4f}, {ref.upper:+.4f}]"
    )

values, mus = assemble_membership(sol)
print("\noutput membership polygon (value, mu):")
for v, m in zip(values, mus):
    print(f"  {v:+.4f}  {m:.2f}")
if sol.nesting_warnings:
    print("\nnesting warnings:", *sol.nesting_warnings, sep="\n  ")
