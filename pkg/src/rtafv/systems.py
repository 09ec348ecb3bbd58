r"""
Linear elastodynamics of a bar, :math:`u = (\sigma, v)`, solved and reconstructed
through its characteristic variables.

With :math:`c(\mu) = \sqrt{E(\mu) / \rho}` and right eigenvectors
:math:`R = \begin{pmatrix} -\rho c & \rho c \\ 1 & 1 \end{pmatrix}`, the
characteristic variables :math:`w = R^{-1} u` satisfy two decoupled transport
equations, :math:`w_1` with speed :math:`+c` and :math:`w_2` with speed :math:`-c`.
Each one is solved with the scalar upwind scheme and reconstructed with the
scalar RTA operator; the conservative variables are rebuilt with ``R`` at the
target parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from rtafv.errors import CFLViolationError, InvalidArgumentError
from rtafv.mesh import CellField, InitialCondition, Mesh1D, project_initial
from rtafv.rta import rta_reconstruct
from rtafv.upwind import SolveConfig, Trajectory, courant_number, evolve

__all__ = [
    "ElastoModel",
    "CharacteristicSpeed",
    "EigenBasis",
    "SystemField",
    "ElastoOffline",
    "build_eigenbasis",
    "to_characteristics",
    "from_characteristics",
    "project_system",
    "run_elasto_trajectory",
    "rta_elasto_reconstruct",
    "direct_elasto_solution",
]


@dataclass(frozen=True)
class ElastoModel:
    """Young modulus ``E(mu) = c0 * mu + c1`` and density ``rho``."""

    c0: float
    c1: float
    rho: float
    mu_min: float = 0.0
    mu_max: float = 1.0

    def __post_init__(self) -> None:
        if not self.rho > 0:
            raise InvalidArgumentError(f"rho must be positive, got {self.rho}")
        for mu in (self.mu_min, self.mu_max):
            if not self.young(mu) > 0:
                raise InvalidArgumentError(f"E(mu) must be positive on the domain, E({mu}) <= 0")

    def young(self, mu: float) -> float:
        return self.c0 * mu + self.c1

    def celerity(self, mu: float) -> float:
        E = self.young(mu)
        if not E > 0:
            raise InvalidArgumentError(f"E({mu}) = {E} is not positive")
        return math.sqrt(E / self.rho)

    def wavespeed(self, mu: float) -> float:
        """Largest characteristic speed, used for the CFL time step."""
        return self.celerity(mu)

    def contains(self, mu: float) -> bool:
        return self.mu_min <= mu <= self.mu_max


@dataclass(frozen=True)
class CharacteristicSpeed:
    """Scalar wavespeed ``sign * c(mu)`` of one characteristic family."""

    model: ElastoModel
    sign: int

    def wavespeed(self, mu: float) -> float:
        return self.sign * self.model.celerity(mu)


@dataclass(frozen=True)
class EigenBasis:
    R: np.ndarray
    R_inv: np.ndarray
    rho_c: float


def build_eigenbasis(model: ElastoModel, mu: float) -> EigenBasis:
    """Right eigenvectors ordered so that column 1 travels at ``+c`` and column 2 at ``-c``.

    The column for ``+c`` is ``(-rho c, 1)``, giving ``w1 = (-sigma / (rho c) + v) / 2``
    and ``w2 = (sigma / (rho c) + v) / 2``.
    """
    rc = model.rho * model.celerity(mu)
    R = np.array([[-rc, rc], [1.0, 1.0]])
    R_inv = np.array([[-0.5 / rc, 0.5], [0.5 / rc, 0.5]])
    return EigenBasis(R=R, R_inv=R_inv, rho_c=rc)


@dataclass(frozen=True, eq=False)
class SystemField:
    """Two cell fields on one mesh, tagged ``"conservative"`` (sigma, v) or
    ``"characteristic"`` (w1, w2)."""

    first: CellField
    second: CellField
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in ("conservative", "characteristic"):
            raise InvalidArgumentError(f"unknown system field kind {self.kind!r}")
        self.first.mesh.check_same(self.second.mesh)

    @property
    def mesh(self) -> Mesh1D:
        return self.first.mesh

    def stacked(self) -> np.ndarray:
        return np.vstack([self.first.values, self.second.values])


def _combine(M: np.ndarray, f: SystemField, kind: str) -> SystemField:
    a, b = f.first.values, f.second.values
    return SystemField(
        f.first.with_values(M[0, 0] * a + M[0, 1] * b),
        f.first.with_values(M[1, 0] * a + M[1, 1] * b),
        kind,
    )


def to_characteristics(U: SystemField, basis: EigenBasis) -> SystemField:
    if U.kind != "conservative":
        raise InvalidArgumentError("expected a conservative (sigma, v) field")
    return _combine(basis.R_inv, U, "characteristic")


def from_characteristics(W: SystemField, basis: EigenBasis) -> SystemField:
    if W.kind != "characteristic":
        raise InvalidArgumentError("expected a characteristic (w1, w2) field")
    return _combine(basis.R, W, "conservative")


def project_system(
    sigma0: InitialCondition | CellField, v0: InitialCondition | CellField, mesh: Mesh1D
) -> SystemField:
    def proj(ic):
        if isinstance(ic, CellField):
            mesh.check_same(ic.mesh)
            return ic
        return project_initial(ic, mesh)

    return SystemField(proj(sigma0), proj(v0), "conservative")


@dataclass(frozen=True)
class ElastoOffline:
    """Both characteristic trajectories of one solve plus the basis used to build them."""

    w1: Trajectory
    w2: Trajectory
    basis: EigenBasis
    mu_i: float

    @property
    def n_steps(self) -> int:
        return self.w1.n_steps

    def characteristic_field(self, k: int) -> SystemField:
        return SystemField(self.w1.field(k), self.w2.field(k), "characteristic")

    def conservative_field(self, k: int) -> SystemField:
        return from_characteristics(self.characteristic_field(k), self.basis)


def run_elasto_trajectory(
    model: ElastoModel,
    mu: float,
    ic: SystemField,
    mesh: Mesh1D,
    cfg: SolveConfig,
) -> ElastoOffline:
    """Upwind solve of both characteristic families at ``mu``."""
    mesh.check_same(ic.mesh)
    basis = build_eigenbasis(model, mu)
    W0 = to_characteristics(ic, basis)
    trajs = []
    for sign, w0 in ((+1, W0.first), (-1, W0.second)):
        speed = CharacteristicSpeed(model, sign)
        nu = courant_number(speed, mu, cfg.dt, mesh)
        if not abs(nu) <= 1.0:
            raise CFLViolationError(f"CFL violated at mu={mu}: |nu|={abs(nu)}")
        trajs.append(
            Trajectory(evolve(w0.values, nu, cfg.n_steps), mesh, mu_i=float(mu), nu_i=nu, dt=cfg.dt)
        )
    return ElastoOffline(w1=trajs[0], w2=trajs[1], basis=basis, mu_i=float(mu))


def rta_elasto_reconstruct(
    offline: ElastoOffline, model: ElastoModel, mu: float, k: int
) -> Tuple[SystemField, SystemField]:
    """Reconstruct both characteristics at ``(mu, k)`` and rebuild ``(sigma, v)`` with ``R(mu)``.

    Returns ``(conservative, characteristic)``.
    """
    phi1 = rta_reconstruct(offline.w1, mu, k, CharacteristicSpeed(model, +1))
    phi2 = rta_reconstruct(offline.w2, mu, k, CharacteristicSpeed(model, -1))
    W = SystemField(phi1, phi2, "characteristic")
    return from_characteristics(W, build_eigenbasis(model, mu)), W


def direct_elasto_solution(offline: ElastoOffline, k: int) -> SystemField:
    """Conservative variables of a direct solve at its own time index ``k``."""
    return offline.conservative_field(k)
