r"""
Uniform periodic 1-D meshes and piecewise-constant cell fields.

Cells are numbered :math:`j = 1, \dots, N` in documentation and CSV output;
storage is 0-based, so ``values[j - 1]`` is the average over the cell
:math:`(x_{j-1/2}, x_{j+1/2})` with :math:`x_{j \pm 1/2} = x_{min} + (j - 1/2 \pm 1/2) \Delta x`.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence, Union

import numpy as np

from rtafv.errors import IncompatibleDiscretizationError, InvalidArgumentError

__all__ = [
    "Mesh1D",
    "CellField",
    "PiecewiseConstant",
    "Sampled",
    "InitialCondition",
    "build_mesh",
    "project_initial",
    "field_to_csv",
]


@dataclass(frozen=True)
class Mesh1D:
    """Uniform periodic mesh of ``n_cells`` cells on ``[x_min, x_max]``."""

    x_min: float
    x_max: float
    n_cells: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)):
            raise InvalidArgumentError("mesh bounds must be finite")
        if self.x_max <= self.x_min:
            raise InvalidArgumentError(
                f"degenerate domain: x_max={self.x_max} <= x_min={self.x_min}"
            )
        if int(self.n_cells) != self.n_cells or self.n_cells < 2:
            raise InvalidArgumentError(f"n_cells must be an integer >= 2, got {self.n_cells}")
        object.__setattr__(self, "n_cells", int(self.n_cells))
        object.__setattr__(self, "x_min", float(self.x_min))
        object.__setattr__(self, "x_max", float(self.x_max))

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_cells

    @property
    def faces(self) -> np.ndarray:
        """The ``N + 1`` face coordinates; the last one is exactly ``x_max``."""
        f = self.x_min + np.arange(self.n_cells + 1) * self.dx
        f[-1] = self.x_max
        return f

    @property
    def centers(self) -> np.ndarray:
        return self.x_min + (np.arange(1, self.n_cells + 1) - 0.5) * self.dx

    def check_same(self, other: "Mesh1D") -> None:
        if self != other:
            raise IncompatibleDiscretizationError(f"mesh mismatch: {self} vs {other}")


def build_mesh(x_min: float, x_max: float, n_cells: int) -> Mesh1D:
    return Mesh1D(x_min, x_max, n_cells)


@dataclass(frozen=True, eq=False)
class CellField:
    """Cell averages on a mesh. The stored array is read-only."""

    values: np.ndarray
    mesh: Mesh1D

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=np.float64, copy=True)
        if v.ndim != 1 or v.size != self.mesh.n_cells:
            raise InvalidArgumentError(
                f"expected {self.mesh.n_cells} cell values, got shape {v.shape}"
            )
        if not np.all(np.isfinite(v)):
            raise InvalidArgumentError("cell values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CellField):
            return NotImplemented
        return self.mesh == other.mesh and np.array_equal(self.values, other.values)

    def with_values(self, values: np.ndarray) -> "CellField":
        return CellField(values, self.mesh)

    def integral(self) -> float:
        return self.mesh.dx * float(np.sum(self.values))


@dataclass(frozen=True)
class PiecewiseConstant:
    """Step function with ``values[0]`` left of ``breakpoints[0]``, ..., ``values[-1]``
    right of ``breakpoints[-1]``.

    The pieces are read on ``[x_min, x_max]`` and extended periodically, so
    ``values[0]`` and ``values[-1]`` may describe the same periodic plateau.
    """

    breakpoints: Sequence[float]
    values: Sequence[float]

    def __post_init__(self) -> None:
        b = tuple(float(x) for x in self.breakpoints)
        v = tuple(float(x) for x in self.values)
        if len(v) != len(b) + 1:
            raise InvalidArgumentError("need exactly one more value than breakpoints")
        if any(b1 >= b2 for b1, b2 in zip(b, b[1:])):
            raise InvalidArgumentError("breakpoints must be strictly increasing")
        if not all(math.isfinite(x) for x in b + v):
            raise InvalidArgumentError("breakpoints and values must be finite")
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "values", v)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(np.asarray(self.breakpoints), x, side="right")
        return np.asarray(self.values)[idx]

    def integral(self, a: float, b: float) -> float:
        """Exact integral over ``[a, b]`` (no periodic wrap)."""
        edges = [a] + [x for x in self.breakpoints if a < x < b] + [b]
        total = 0.0
        for lo, hi in zip(edges, edges[1:]):
            total += (hi - lo) * float(self(np.array([0.5 * (lo + hi)]))[0])
        return total


@dataclass(frozen=True)
class Sampled:
    """Pointwise-evaluable initial data averaged by a composite midpoint rule."""

    func: Callable[[np.ndarray], np.ndarray]
    samples_per_cell: int = field(default=16)

    def __post_init__(self) -> None:
        if self.samples_per_cell < 1:
            raise InvalidArgumentError("samples_per_cell must be positive")


InitialCondition = Union[PiecewiseConstant, Sampled]


def _project_piecewise(ic: PiecewiseConstant, mesh: Mesh1D) -> np.ndarray:
    b = np.asarray(ic.breakpoints, dtype=np.float64)
    if b.size and (b[0] < mesh.x_min or b[-1] > mesh.x_max):
        raise InvalidArgumentError("breakpoints must lie inside [x_min, x_max]")
    faces = mesh.faces
    pieces = np.asarray(ic.values)
    left = np.searchsorted(b, faces[:-1], side="right")
    right = np.searchsorted(b, faces[1:], side="left")
    out = pieces[left].copy()
    # cells whose interior contains at least one breakpoint
    for j in np.nonzero(right > left)[0]:
        out[j] = ic.integral(faces[j], faces[j + 1]) / (faces[j + 1] - faces[j])
    return out


def project_initial(ic: InitialCondition, mesh: Mesh1D) -> CellField:
    """L2 projection of ``ic`` onto the cell averages of ``mesh``.

    Step functions are averaged exactly by interval intersection; sampled
    functions use the midpoint rule with ``ic.samples_per_cell`` points per cell.
    """
    if isinstance(ic, PiecewiseConstant):
        return CellField(_project_piecewise(ic, mesh), mesh)
    if isinstance(ic, Sampled):
        m = ic.samples_per_cell
        offsets = (np.arange(m) + 0.5) / m
        x = mesh.faces[:-1, None] + offsets[None, :] * mesh.dx
        vals = np.asarray(ic.func(x), dtype=np.float64).reshape(mesh.n_cells, m)
        return CellField(vals.mean(axis=1), mesh)
    raise InvalidArgumentError(f"unsupported initial condition {type(ic).__name__}")


def parse_number(value) -> float:
    """Accept numbers or exact rational strings such as ``"-10/3"``."""
    if isinstance(value, str):
        return float(Fraction(value.strip()))
    return float(value)


def format_float(x: float) -> str:
    # shortest round-trip representation
    return repr(float(x))


def field_to_csv(f: CellField, comments: Sequence[str] = ()) -> str:
    """Render ``f`` as ``j,x_center,value`` rows (1-based ``j``)."""
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    buf.write("j,x_center,value\n")
    for j, (xc, v) in enumerate(zip(f.mesh.centers, f.values), start=1):
        buf.write(f"{j},{format_float(xc)},{format_float(v)}\n")
    return buf.getvalue()
