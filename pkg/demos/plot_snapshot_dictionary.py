"""
Choosing among several snapshots
================================

With more than one stored trajectory, the closest wavespeed is a cheap rule.
Measuring the error against a direct solve shows how often it is the right one.
"""

from rtafv import (
    PiecewiseConstant,
    SnapshotStore,
    SolveConfig,
    TransportModel,
    build_mesh,
    cfl_timestep,
    run_trajectory,
    select_best_measured,
    select_nearest,
)

model = TransportModel(alpha=5.0, beta=2.0)
mesh = build_mesh(-10.0, 10.0, 250)
dt = cfl_timestep(model, mesh, 0.8, 1.0)
ic = PiecewiseConstant([-10.0 / 3.0, 10.0 / 3.0], [1.0, -1.0, 1.0])
cfg = SolveConfig.from_final_time(dt, 1.0)

store = SnapshotStore(run_trajectory(model, mu_i, ic, mesh, cfg) for mu_i in (0.1, 0.4, 0.65, 0.9))
print("keys:", store.keys())

for mu in (0.2, 0.5, 0.8):
    ref = run_trajectory(model, mu, ic, mesh, cfg)
    nearest = select_nearest(store, mu, model)
    agree = 0
    for k in range(1, cfg.n_steps + 1):
        best, _ = select_best_measured(store, mu, k, ref.field(k), model)
        agree += best == nearest
    print(f"mu={mu}: nearest key {nearest}, best by measured error at {agree}/{cfg.n_steps} time indices")
