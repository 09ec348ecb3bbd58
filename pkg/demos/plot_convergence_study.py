"""
Mesh refinement of the reconstruction error
===========================================

The reconstruction error decays roughly like the square root of the cell size,
the same order as the upwind scheme itself on discontinuous data.
"""

import numpy as np

from rtafv import (
    PiecewiseConstant,
    SolveConfig,
    TransportModel,
    build_mesh,
    cfl_timestep,
    fit_convergence_rate,
    l1_abs_error,
    l1_rel_error,
    rta_reconstruct,
    run_trajectory,
)

model = TransportModel(alpha=5.0, beta=2.0)
ic = PiecewiseConstant([-10.0 / 3.0, 10.0 / 3.0], [1.0, -1.0, 1.0])
mu_i, final_time = 0.65, 1.0

###############################################################################
# Errors at the final time on five meshes.

rows = {}
for n in (125, 250, 500, 1000, 2000):
    mesh = build_mesh(-10.0, 10.0, n)
    cfg = SolveConfig.from_final_time(cfl_timestep(model, mesh, 0.8, 1.0), final_time)
    snap = run_trajectory(model, mu_i, ic, mesh, cfg)
    for mu in (0.2, 0.5, 0.8):
        ref = run_trajectory(model, mu, ic, mesh, cfg).field(cfg.n_steps)
        phi = rta_reconstruct(snap, mu, cfg.n_steps, model)
        rows.setdefault(mu, []).append((mesh.dx, l1_abs_error(phi, ref), l1_rel_error(phi, ref)))

for mu, pts in rows.items():
    rate, C = fit_convergence_rate([(dx, ea) for dx, ea, _ in pts])
    print(f"mu={mu}: rate {rate:.3f}, C {C:.3f}")
    for dx, ea, er in pts:
        print(f"   dx={dx:.4f}  e_abs={ea:.4e}  e_rel={er:.4e}")

###############################################################################
# Error history on one mesh: it stays flat instead of growing.

mesh = build_mesh(-10.0, 10.0, 250)
cfg = SolveConfig.from_final_time(cfl_timestep(model, mesh, 0.8, 1.0), final_time)
snap = run_trajectory(model, mu_i, ic, mesh, cfg)
ref = run_trajectory(model, 0.8, ic, mesh, cfg)
hist = np.array([l1_rel_error(rta_reconstruct(snap, 0.8, k, model), ref.field(k)) for k in range(1, cfg.n_steps + 1)])
print(f"e_rel over time: min {hist.min():.3e}, median {np.median(hist):.3e}, max {hist.max():.3e}")

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    for mu, pts in rows.items():
        dx, ea, _ = zip(*pts)
        plt.loglog(dx, ea, "o-", label=f"mu={mu}")
    plt.loglog(dx, 0.3 * np.sqrt(dx), "k:", label="dx^1/2")
    plt.xlabel("dx")
    plt.ylabel("L1 error")
    plt.legend()
    plt.show()
