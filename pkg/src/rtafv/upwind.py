r"""
First-order upwind finite volume solver for :math:`\partial_t u + a(\mu) \partial_x u = 0`
with periodic boundaries.

With Courant number :math:`\nu = a(\mu) \Delta t / \Delta x` one step is
``K(nu) u`` for :math:`\nu \ge 0` and its left-moving mirror for :math:`\nu < 0`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np

from rtafv.errors import CFLViolationError, InvalidArgumentError
from rtafv.mesh import CellField, InitialCondition, Mesh1D, project_initial
from rtafv.shift_ops import apply_K

__all__ = [
    "WaveSpeedModel",
    "TransportModel",
    "SolveConfig",
    "Trajectory",
    "cfl_timestep",
    "courant_number",
    "upwind_step",
    "run_trajectory",
    "evolve",
]


class WaveSpeedModel(Protocol):
    def wavespeed(self, mu: float) -> float: ...


@dataclass(frozen=True)
class TransportModel:
    """Affine wavespeed ``a(mu) = alpha * mu + beta`` on ``[mu_min, mu_max]``."""

    alpha: float
    beta: float
    mu_min: float = 0.0
    mu_max: float = 1.0

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "mu_min", "mu_max"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidArgumentError(f"{name} must be finite")
        if self.mu_max < self.mu_min:
            raise InvalidArgumentError("empty parameter domain")

    def wavespeed(self, mu: float) -> float:
        return self.alpha * mu + self.beta

    def contains(self, mu: float) -> bool:
        return self.mu_min <= mu <= self.mu_max


@dataclass(frozen=True)
class SolveConfig:
    dt: float
    n_steps: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise InvalidArgumentError(f"dt must be positive, got {self.dt}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 0:
            raise InvalidArgumentError(f"n_steps must be a non-negative integer, got {self.n_steps}")
        object.__setattr__(self, "n_steps", int(self.n_steps))

    @classmethod
    def from_final_time(cls, dt: float, final_time: float) -> "SolveConfig":
        return cls(dt=dt, n_steps=int(round(final_time / dt)))


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Snapshots ``values[k]`` at ``t = k * dt`` for ``k = 0..n_steps`` of one solve.

    ``nu_i`` is the Courant number of the solve and ``mu_i`` its parameter.
    """

    values: np.ndarray
    mesh: Mesh1D
    mu_i: float
    nu_i: float
    dt: float

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=np.float64, copy=True)
        if v.ndim != 2 or v.shape[1] != self.mesh.n_cells or v.shape[0] < 1:
            raise InvalidArgumentError(
                f"trajectory values must have shape (K+1, {self.mesh.n_cells}), got {v.shape}"
            )
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n_steps(self) -> int:
        return self.values.shape[0] - 1

    def field(self, k: int) -> CellField:
        if not 0 <= k <= self.n_steps:
            raise InvalidArgumentError(f"time index {k} outside [0, {self.n_steps}]")
        return CellField(self.values[k], self.mesh)

    @property
    def fields(self) -> Sequence[CellField]:
        return [self.field(k) for k in range(self.n_steps + 1)]

    def time(self, k: int) -> float:
        return k * self.dt

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Trajectory):
            return NotImplemented
        return (
            self.mesh == other.mesh
            and self.mu_i == other.mu_i
            and self.nu_i == other.nu_i
            and self.dt == other.dt
            and np.array_equal(self.values, other.values)
        )


def cfl_timestep(model: WaveSpeedModel, mesh: Mesh1D, cfl: float, mu_ref: float) -> float:
    """``dt = cfl * dx / |a(mu_ref)|``."""
    if not 0.0 < cfl <= 1.0:
        raise InvalidArgumentError(f"cfl must lie in (0, 1], got {cfl}")
    a = model.wavespeed(mu_ref)
    if a == 0.0:
        raise InvalidArgumentError(f"zero wavespeed at mu_ref={mu_ref}")
    return cfl * mesh.dx / abs(a)


def courant_number(model: WaveSpeedModel, mu: float, dt: float, mesh: Mesh1D) -> float:
    return model.wavespeed(mu) * dt / mesh.dx


def upwind_step(u: CellField, nu: float) -> CellField:
    if not abs(nu) <= 1.0:
        raise CFLViolationError(f"|nu| = {abs(nu)} > 1: upwind step is unstable")
    if nu >= 0.0:
        return apply_K(u, nu)
    v = u.values
    return u.with_values((1.0 + nu) * v + (-nu) * np.roll(v, -1))


def evolve(u0: np.ndarray, nu: float, n_steps: int) -> np.ndarray:
    """Stack ``u0`` and ``n_steps`` upwind updates into a ``(n_steps + 1, N)`` array."""
    if not abs(nu) <= 1.0:
        raise CFLViolationError(f"|nu| = {abs(nu)} > 1: upwind step is unstable")
    out = np.empty((n_steps + 1, u0.size))
    out[0] = u0
    # same arithmetic as upwind_step, without the per-step CellField checks
    if nu >= 0.0:
        shift, w = 1, nu
    else:
        shift, w = -1, -nu
    for k in range(n_steps):
        out[k + 1] = (1.0 - w) * out[k] + w * np.roll(out[k], shift)
    return out


def run_trajectory(
    model: WaveSpeedModel,
    mu: float,
    ic: InitialCondition | CellField,
    mesh: Mesh1D,
    cfg: SolveConfig,
) -> Trajectory:
    nu = courant_number(model, mu, cfg.dt, mesh)
    if not abs(nu) <= 1.0:
        raise CFLViolationError(f"CFL violated at mu={mu}: nu={nu}")
    if isinstance(ic, CellField):
        mesh.check_same(ic.mesh)
        u0 = ic.values
    else:
        u0 = project_initial(ic, mesh).values
    return Trajectory(evolve(u0, nu, cfg.n_steps), mesh, mu_i=float(mu), nu_i=nu, dt=cfg.dt)
