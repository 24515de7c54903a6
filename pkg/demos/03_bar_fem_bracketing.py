"""Static bar with interval stiffness and cross-section, verified against FEM.

The bar (E A u')' + cos(3x) x = 0 on [0, 2] carries interval fields E(x) and
A(x).  The four endpoint combinations of the bounds (e.g. E lower with A
upper) give four deterministic FEM solutions -- but the true output bounds
need not coincide with any of them, which is exactly what the network pair is
trained to find.  A second FEM pass driven by the realized fields of each
branch then re-verifies the predicted bounds independently.

Default here is a shortened 20,000-epoch run (about 2 minutes); pass a
different epoch count as the first argument, e.g. 100000 for the desk-scale
acceptance setting.
"""

import sys
import dataclasses

import numpy as np

from ifpinn import neural, oracle, training
from ifpinn.problem import BAR_END_LOAD, get_problem

epochs = int(sys.argv[1]) if len(sys.argv) > 1 else 20000
prob = get_problem("bar-1d")
cfg = dataclasses.replace(training.default_config("bar-1d"), epochs=epochs)

print(f"training {prob.name} for {epochs} epochs (lr={cfg.lr}, {cfg.n_interior} points)")
bundle = training.train(
    prob, cfg,
    callback=lambda e, b, pu, pp: e % 5000 == 0 and print(
        f"  epoch {e:>6d}  mse_g={b.mse_g:.3e}  mse_u={b.mse_u:.3e}"
    ),
)

# four endpoint-combination FEM solutions on the same nodes
mesh = oracle.FemMesh(bundle.x)
load = lambda x: np.cos(3.0 * x) * x
curves = {}
for label, e_fn, a_fn in oracle.endpoint_combinations(prob):
    curves[label] = oracle.fem_solve_bar(e_fn, a_fn, load, BAR_END_LOAD, mesh)

stack = np.stack(list(curves.values()))
lower_env, upper_env = stack.min(axis=0), stack.max(axis=0)
print("\nx        u_min_net  env_min   u_max_net  env_max")
for i in range(0, bundle.x.size, bundle.x.size // 8):
    print(
        f"{bundle.x[i]:4.2f}   {bundle.u_min[i]:+9.5f} {lower_env[i]:+9.5f}"
        f"   {bundle.u_max[i]:+9.5f} {upper_env[i]:+9.5f}"
    )

# FEM re-solve with the realized fields of each branch
def realized(col):
    def fn(x):
        head = neural.forward_field(
            bundle.params_p, np.asarray(x).reshape(-1, 1), None, prob.fields
        )
        return np.asarray(head.cols[col]).ravel()
    return fn

for branch, col_e, col_a, u_net in (("min", 0, 2, bundle.u_min),
                                    ("max", 1, 3, bundle.u_max)):
    u_fem = oracle.fem_solve_bar(realized(col_e), realized(col_a), load,
                                 BAR_END_LOAD, mesh)
    err = np.max(np.abs(u_fem - u_net))
    print(f"\nFEM re-solve with realized fields ({branch} branch): "
          f"max |u_fem - u_net| = {err:.2e}")
