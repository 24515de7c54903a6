"""Verification layer: autodiff checks and oracle convergence.

Everything the training loop relies on is independently checkable:
  * reverse-mode gradients of random expression trees vs central differences,
  * jet-propagated input derivatives (u_x, u_xx) vs central differences,
  * the FEM oracle's O(h^2) convergence on a manufactured solution,
  * the finite-difference oracle's stability guard.

Equivalent to `ifpinn check`, plus a manufactured-solution table.  Runs in
seconds.
"""

import numpy as np

from ifpinn import gradcheck, oracle

print("randomized derivative checks (100 graphs each):")
for result in gradcheck.run_all(n_graphs=100):
    status = "ok" if result.passed else "FAILED"
    print(f"  {result.name:<24s} max rel err {result.max_rel_err:.2e} "
          f"(tolerance {result.tolerance:.0e})  {status}")

print("\nFEM manufactured-solution convergence, E(x) = 1 + 0.5 sin(x):")
prev = None
for n_el in (50, 100, 200, 400):
    e_c, e_f, _ = oracle.fem_convergence_ratio(n_coarse=n_el)
    ratio = "" if prev is None else f"  ratio vs previous: {prev / e_c:.3f}"
    print(f"  {n_el:>4d} elements: max nodal error {e_c:.3e}{ratio}")
    prev = e_c

print("\nfinite-difference stability guard:")
grid = oracle.FdGrid(n_x=201)
print(f"  201 nodes -> dx = {grid.dx:.4f}, auto time step dt = {grid.dt:.2e}")
try:
    oracle.FdGrid(n_x=201, dt=1e-2)
except ValueError as exc:
    print(f"  dt = 1e-2 rejected: {exc}")
