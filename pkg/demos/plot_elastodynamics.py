"""
Impact on an elastic bar
========================

The left half of a stress-free bar moves at unit speed into the right half.
Stress and velocity are split into two characteristic waves, each moved with
the scalar machinery, and put back together at the new stiffness.
"""

import numpy as np

from rtafv import (
    ElastoModel,
    PiecewiseConstant,
    SolveConfig,
    build_mesh,
    cfl_timestep,
    l1_rel_error,
    rta_elasto_reconstruct,
    run_elasto_trajectory,
)
from rtafv.systems import project_system

# Young modulus E(mu) = 19e10 mu + 1e11 Pa, steel density
model = ElastoModel(c0=19e10, c1=1e11, rho=7800.0)
mesh = build_mesh(-10.0, 10.0, 250)
dt = cfl_timestep(model, mesh, 0.8, 1.0)
ic = project_system(PiecewiseConstant([], [0.0]), PiecewiseConstant([0.0], [1.0, 0.0]), mesh)

times = (1.29e-3, 3.88e-3, 9.06e-3, 1.29e-2)
ks = [int(round(t / dt)) for t in times]
cfg = SolveConfig(dt, max(ks))

offline = run_elasto_trajectory(model, 0.05, ic, mesh, cfg)
direct = run_elasto_trajectory(model, 0.8, ic, mesh, cfg)
print(f"c(0.05) = {model.celerity(0.05):.1f} m/s, c(0.8) = {model.celerity(0.8):.1f} m/s")

for t, k in zip(times, ks):
    U, _ = rta_elasto_reconstruct(offline, model, 0.8, k)
    D = direct.conservative_field(k)
    print(
        f"t={t:.2e} (k={k}): e_rel sigma {l1_rel_error(U.first, D.first):.3e}, "
        f"v {l1_rel_error(U.second, D.second):.3e}, min sigma {U.first.values.min():.3e} Pa"
    )

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True)
    for k in ks:
        U, _ = rta_elasto_reconstruct(offline, model, 0.8, k)
        D = direct.conservative_field(k)
        ax1.plot(mesh.centers, D.first.values, "k-", lw=0.8)
        ax1.plot(mesh.centers, U.first.values, "--")
        ax2.plot(mesh.centers, D.second.values, "k-", lw=0.8)
        ax2.plot(mesh.centers, U.second.values, "--")
    ax1.set_ylabel("sigma [Pa]")
    ax2.set_ylabel("v [m/s]")
    ax2.set_xlabel("x [m]")
    plt.show()
