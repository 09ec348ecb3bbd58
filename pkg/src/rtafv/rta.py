r"""
Reconstruct-Translate-Average: rebuild the finite volume solution at a new
parameter from one stored trajectory, at a fixed time index, without time stepping.

For the transport equation the translation between the characteristics of
:math:`\mu` and :math:`\mu_i` at :math:`t^k` is :math:`k (\nu - \nu_i)` cells, so

.. math::

    \phi_j = (1 - \theta) u^k_{j-p+1} + \theta u^k_{j-p},
    \qquad \theta = \{k(\nu - \nu_i)\}, \quad p = \lfloor k(\nu - \nu_i) \rfloor + 1.

:func:`rta_reconstruct` evaluates that formula in O(N).
:func:`rta_reconstruct_oracle` does the same job literally (build the step
function, move it in physical coordinates, integrate it over every cell) in
extended precision, and serves as an independent check of the fast path.
"""

from __future__ import annotations

import numpy as np

from rtafv.errors import IncompatibleDiscretizationError, InvalidArgumentError
from rtafv.mesh import CellField, Mesh1D
from rtafv.shift_ops import ShiftIndex, apply_K, apply_L_power, decompose_shift
from rtafv.upwind import Trajectory, WaveSpeedModel

__all__ = [
    "SNAP_TOL",
    "relative_shift",
    "rta_shift_index",
    "rta_reconstruct",
    "rta_reconstruct_oracle",
    "translate_and_average",
    "projection_l1_distance",
]

SNAP_TOL = 1e-12
_NU_RTOL = 1e-12


def relative_shift(traj: Trajectory, mu: float, k: int, model: WaveSpeedModel) -> float:
    """Cells travelled by the target relative to the snapshot after ``k`` steps.

    The Courant numbers are recomputed from the trajectory's own ``dt`` and ``dx``;
    a model that does not reproduce the stored ``nu_i`` is rejected.
    """
    if not 0 <= k <= traj.n_steps:
        raise InvalidArgumentError(f"time index {k} outside [0, {traj.n_steps}]")
    dx = traj.mesh.dx
    nu_i = model.wavespeed(traj.mu_i) * traj.dt / dx
    if abs(nu_i - traj.nu_i) > _NU_RTOL * max(abs(traj.nu_i), 1.0):
        raise IncompatibleDiscretizationError(
            f"model gives nu_i={nu_i!r} at mu_i={traj.mu_i}, trajectory stores {traj.nu_i!r}"
        )
    nu = model.wavespeed(mu) * traj.dt / dx
    # one product, not a running sum: keeps theta free of drift for large k
    return k * (nu - traj.nu_i)


def _snap(idx: ShiftIndex, n_cells: int) -> ShiftIndex:
    if 0.0 < idx.theta < SNAP_TOL:
        return ShiftIndex(p=idx.p, theta=0.0, floor=idx.floor)
    if idx.theta > 1.0 - SNAP_TOL:
        fl = idx.floor + 1
        return ShiftIndex(p=(fl + 1) % n_cells, theta=0.0, floor=fl)
    return idx


def rta_shift_index(traj: Trajectory, mu: float, k: int, model: WaveSpeedModel) -> ShiftIndex:
    s = relative_shift(traj, mu, k, model)
    return _snap(decompose_shift(s, traj.mesh.n_cells), traj.mesh.n_cells)


def rta_reconstruct(traj: Trajectory, mu: float, k: int, model: WaveSpeedModel) -> CellField:
    """Approximate the solution at ``mu`` and ``t = k * dt`` from ``traj.field(k)`` only."""
    idx = rta_shift_index(traj, mu, k, model)
    return apply_K(apply_L_power(traj.field(k), idx.floor), idx.theta)


def _shifted_partition(values: np.ndarray, mesh: Mesh1D, shift_cells: float):
    """Common refinement of the mesh and the translated mesh, in local coordinates.

    Returns sub-interval lengths, the source cell whose value the translated step
    function takes there, and the target cell containing it.
    """
    n = values.size
    ld = np.longdouble
    length = ld(mesh.x_max) - ld(mesh.x_min)
    dx = length / n
    d = np.mod(ld(shift_cells) * dx, length)
    faces = np.arange(n + 1, dtype=ld) * dx
    faces[-1] = length
    moved = np.mod(np.arange(n, dtype=ld) * dx + d, length)
    pts = np.unique(np.concatenate([faces, moved]))
    a, b = pts[:-1], pts[1:]
    mid = 0.5 * (a + b)
    src = np.clip(np.floor(np.mod(mid - d, length) / dx).astype(np.int64), 0, n - 1)
    tgt = np.clip(np.floor(mid / dx).astype(np.int64), 0, n - 1)
    return b - a, src, tgt, dx


def translate_and_average(values: np.ndarray, mesh: Mesh1D, shift_cells: float) -> np.ndarray:
    """Cell averages of the step function ``values`` moved right by ``shift_cells * dx``."""
    vals = np.asarray(values, dtype=np.longdouble)
    lengths, src, tgt, dx = _shifted_partition(vals, mesh, shift_cells)
    acc = np.zeros(vals.size, dtype=np.longdouble)
    np.add.at(acc, tgt, lengths * vals[src])
    return (acc / dx).astype(np.float64)


def projection_l1_distance(values: np.ndarray, mesh: Mesh1D, shift_cells: float) -> float:
    """Measured L1 distance between the translated step function and its cell averages."""
    vals = np.asarray(values, dtype=np.longdouble)
    lengths, src, tgt, dx = _shifted_partition(vals, mesh, shift_cells)
    acc = np.zeros(vals.size, dtype=np.longdouble)
    np.add.at(acc, tgt, lengths * vals[src])
    avg = acc / dx
    return float(np.sum(lengths * np.abs(vals[src] - avg[tgt])))


def rta_reconstruct_oracle(
    traj: Trajectory, mu: float, k: int, model: WaveSpeedModel
) -> CellField:
    s = relative_shift(traj, mu, k, model)
    u = traj.field(k)
    return u.with_values(translate_and_average(u.values, u.mesh, s))
