"""Total variation, discrete L1 errors, the closed-form projection error and rate fits."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Tuple, Union

import numpy as np

from rtafv.errors import DegenerateNormError, InvalidArgumentError
from rtafv.mesh import CellField

__all__ = [
    "ErrorReport",
    "total_variation",
    "l1_abs_error",
    "l1_rel_error",
    "projection_error_l1",
    "fit_convergence_rate",
]


@dataclass(frozen=True)
class ErrorReport:
    e_abs: float
    e_rel: float
    tv: float
    k: int
    mu: float
    mu_i: float
    theta: float
    p: int


def _vals(u: Union[CellField, np.ndarray]) -> np.ndarray:
    return u.values if isinstance(u, CellField) else np.asarray(u, dtype=np.float64)


def total_variation(u: Union[CellField, np.ndarray]) -> float:
    """Periodic total variation ``sum_j |u[j+1] - u[j]|`` including the wrap-around jump."""
    v = _vals(u)
    return float(np.sum(np.abs(np.roll(v, -1) - v)))


def _check_pair(a, b) -> None:
    if isinstance(a, CellField) and isinstance(b, CellField):
        a.mesh.check_same(b.mesh)


def l1_abs_error(a: CellField, b: CellField) -> float:
    """``dx * sum_j |a_j - b_j|``."""
    _check_pair(a, b)
    return a.mesh.dx * float(np.sum(np.abs(a.values - b.values)))


def l1_rel_error(a: CellField, b: CellField) -> float:
    """``sum_j |a_j - b_j| / sum_j |b_j|``; ``b`` is the reference."""
    _check_pair(a, b)
    denom = float(np.sum(np.abs(b.values)))
    if denom == 0.0:
        raise DegenerateNormError("relative error against an all-zero reference")
    return float(np.sum(np.abs(a.values - b.values))) / denom


def projection_error_l1(snapshot_k: CellField, theta: float) -> float:
    """Exact L1 distance between a snapshot moved by a fractional ``theta`` of a
    cell and its cell averages: ``2 dx (1 - theta) theta TV``."""
    return 2.0 * snapshot_k.mesh.dx * (1.0 - theta) * theta * total_variation(snapshot_k)


def fit_convergence_rate(points: Iterable[Tuple[float, float]]) -> Tuple[float, float]:
    """Least-squares fit of ``error = C * dx**rate`` over all points.

    Returns ``(rate, C)``.
    """
    pts = np.asarray(list(points), dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 2 or pts.shape[1] != 2:
        raise InvalidArgumentError("need at least two (dx, error) pairs")
    if not np.all(np.isfinite(pts)) or np.any(pts <= 0.0):
        raise InvalidArgumentError("dx and error values must be finite and positive")
    x, y = np.log(pts[:, 0]), np.log(pts[:, 1])
    if np.ptp(x) == 0.0:
        raise InvalidArgumentError("need at least two distinct dx values")
    A = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(slope), float(np.exp(intercept))
