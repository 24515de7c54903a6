"""Nonlinear reaction-diffusion PDE with an interval reaction field.

u_t = 0.01 u u_xx - k u^3 + k^3 on x in [-1, 1], t in [0, 1], with k(x, t)
known only between k^L and k^U.  The key observation: plugging the *lower
bound* k^L into a deterministic solver does NOT give the minimum solution
field -- the minimizing realization sits at interior field values.  The field
network hands us that realization directly, and a finite-difference re-solve
with it reproduces the network's minimum branch.

Default is a shortened 4,000-epoch run to show the machinery (a few minutes);
pass an epoch count (e.g. 30000) to reproduce the desk-scale acceptance run.
"""

import sys
import dataclasses

import numpy as np

from ifpinn import neural, oracle, training
from ifpinn.problem import get_problem

epochs = int(sys.argv[1]) if len(sys.argv) > 1 else 4000
prob = get_problem("nonlinear-pde")
cfg = dataclasses.replace(training.default_config("nonlinear-pde"), epochs=epochs)

print(f"training {prob.name} for {epochs} epochs on a "
      f"{cfg.n_interior}x{cfg.n_time} space-time grid")
bundle = training.train(
    prob, cfg,
    callback=lambda e, b, pu, pp: e % 1000 == 0 and print(
        f"  epoch {e:>6d}  mse_g={b.mse_g:.3e}  mse_0={b.mse_0:.3e}"
    ),
)

# finite-difference oracle runs: lower *bound* vs realized minimum field
t_star = 0.7
fd_lower = oracle.fd_solve_nonlinear(lambda x, t: 0.5 * np.sin(3.0 * x) * np.cos(t))

def k_realized(x, t):
    head = neural.forward_field(
        bundle.params_p, np.asarray(x).reshape(-1, 1),
        np.asarray(t).reshape(-1, 1), prob.fields,
    )
    return np.asarray(head.cols[0]).ravel()

fd_realized = oracle.fd_solve_nonlinear(k_realized)

x = fd_lower.x
out = np.asarray(
    neural.forward_u(bundle.params_u, x.reshape(-1, 1), np.full((x.size, 1), t_star))
)
u_min_net = out[:, 0]
sl_lower = fd_lower.at_time(t_star)
sl_realized = fd_realized.at_time(t_star)

print(f"\nat t = {t_star}:")
print("x        u_min_net   FD(k_lower)  FD(k_realized)")
for i in range(0, x.size, x.size // 10):
    print(f"{x[i]:+5.2f}   {u_min_net[i]:+9.4f}   {sl_lower[i]:+9.4f}    "
          f"{sl_realized[i]:+9.4f}")

err_lower = np.max(np.abs(sl_lower - u_min_net))
err_realized = np.max(np.abs(sl_realized - u_min_net))
print(f"\nmax |FD(k_lower)    - u_min_net| = {err_lower:.3f}")
print(f"max |FD(k_realized) - u_min_net| = {err_realized:.3f}")
print("with enough epochs (try 30000) the realized field reproduces the")
print("minimum branch while the lower bound does not")
