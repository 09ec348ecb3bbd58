r"""
Periodic shift operators acting on cell vectors.

``L`` is the cyclic permutation :math:`(L u)_j = u_{j-1}`, ``K(w) = (1 - w) I + w L``
for :math:`w \in [0, 1]`, and the generalized operator :math:`\mathcal{K}(s)` moves
content by an arbitrary real number of cells: ``L`` to the power :math:`\lfloor s \rfloor`
followed by ``K`` of the fractional part. None of them is ever stored as a matrix.

Every function accepts either a :class:`~rtafv.mesh.CellField` or a 1-D array and
returns the same kind.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TypeVar, Union

import numpy as np

from rtafv.errors import InvalidArgumentError
from rtafv.mesh import CellField

__all__ = [
    "ShiftIndex",
    "apply_L_power",
    "apply_K",
    "decompose_shift",
    "apply_generalized_shift",
]

FieldLike = TypeVar("FieldLike", CellField, np.ndarray)


def _unwrap(u: Union[CellField, np.ndarray]) -> np.ndarray:
    if isinstance(u, CellField):
        return u.values
    return np.asarray(u, dtype=np.float64)


def _rewrap(template: FieldLike, values: np.ndarray) -> FieldLike:
    if isinstance(template, CellField):
        return template.with_values(values)
    return values


@dataclass(frozen=True)
class ShiftIndex:
    """Integer/fractional split of a real cell shift ``s``.

    ``p = (floor(s) + 1) mod N`` and ``theta = s - floor(s)``.
    """

    p: int
    theta: float
    floor: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.theta < 1.0:
            raise InvalidArgumentError(f"theta={self.theta} outside [0, 1)")


def apply_L_power(u: FieldLike, m: int) -> FieldLike:
    """Cyclic shift by ``m`` cells: ``out[j] = u[(j - m) mod N]``. Negative ``m``
    applies the transpose."""
    return _rewrap(u, np.roll(_unwrap(u), int(m)))


def apply_K(u: FieldLike, omega: float) -> FieldLike:
    """Apply ``K(omega) = (1 - omega) I + omega L``; only defined on ``[0, 1]``."""
    if not 0.0 <= omega <= 1.0:
        raise InvalidArgumentError(f"K(omega) requires 0 <= omega <= 1, got {omega}")
    v = _unwrap(u)
    return _rewrap(u, (1.0 - omega) * v + omega * np.roll(v, 1))


def decompose_shift(s: float, n_cells: int) -> ShiftIndex:
    if not math.isfinite(s):
        raise InvalidArgumentError(f"shift must be finite, got {s}")
    fl = math.floor(s)
    theta = s - fl
    if theta >= 1.0:
        # s - floor(s) rounds up to 1 for tiny negative s
        fl, theta = fl + 1, 0.0
    return ShiftIndex(p=(fl + 1) % n_cells, theta=theta, floor=fl)


def apply_generalized_shift(u: FieldLike, s: float) -> FieldLike:
    r"""Move ``u`` right by ``s`` cells (left when negative) and re-average.

    ``out[j] = (1 - theta) u[j - p + 1] + theta u[j - p]`` (indices mod N)
    with ``(p, theta) = decompose_shift(s, N)``.
    """
    v = _unwrap(u)
    idx = decompose_shift(s, v.size)
    return apply_K(apply_L_power(u, idx.floor), idx.theta)
