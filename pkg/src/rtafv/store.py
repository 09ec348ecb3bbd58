"""
Offline/online plumbing: trajectory files and a dictionary of snapshots.

File layout (``format_version=1``)::

    format_version=1
    mu_i=0.4
    nu_i=0.4571428571428572
    dt=0.009142857142857144
    n_cells=250
    x_min=-10.0
    x_max=10.0
    n_steps=87
    sha256=<hex digest of the header lines above plus the payload>
    <blank line>
    <(n_steps + 1) * n_cells little-endian float64, k-major>

Floats in the header use the shortest round-trip decimal, so a save/load
cycle is bit-exact.
"""

from __future__ import annotations

import hashlib
import io
import os
import tempfile
from pathlib import Path
from typing import Dict, Iterator, Optional, Tuple, Union

import numpy as np

from rtafv.errors import (
    IncompatibleDiscretizationError,
    InvalidArgumentError,
    SnapshotNotFoundError,
    StoreIntegrityError,
    StoreParseError,
)
from rtafv.mesh import CellField, Mesh1D, format_float
from rtafv.metrics import l1_abs_error
from rtafv.rta import rta_reconstruct
from rtafv.upwind import Trajectory, WaveSpeedModel

__all__ = [
    "FORMAT_VERSION",
    "save_trajectory",
    "load_trajectory",
    "dumps_trajectory",
    "loads_trajectory",
    "trajectory_to_csv",
    "atomic_write",
    "SnapshotStore",
    "select_nearest",
    "select_best_measured",
]

FORMAT_VERSION = 1
_DTYPE = np.dtype("<f8")
_FLOAT_KEYS = ("mu_i", "nu_i", "dt", "x_min", "x_max")
_INT_KEYS = ("format_version", "n_cells", "n_steps")
_KEYS = _INT_KEYS + _FLOAT_KEYS + ("sha256",)


def atomic_write(path: Union[str, Path], data: Union[bytes, str]) -> None:
    """Write to a temporary file in the same directory, then rename over ``path``."""
    path = Path(path)
    if isinstance(data, str):
        data = data.encode("utf-8")
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps_trajectory(traj: Trajectory) -> bytes:
    payload = np.ascontiguousarray(traj.values, dtype=_DTYPE).tobytes()
    header = {
        "format_version": str(FORMAT_VERSION),
        "mu_i": format_float(traj.mu_i),
        "nu_i": format_float(traj.nu_i),
        "dt": format_float(traj.dt),
        "n_cells": str(traj.mesh.n_cells),
        "x_min": format_float(traj.mesh.x_min),
        "x_max": format_float(traj.mesh.x_max),
        "n_steps": str(traj.n_steps),
    }
    text = "".join(f"{k}={v}\n" for k, v in header.items())
    digest = _digest(text, payload)
    return (text + f"sha256={digest}\n\n").encode("utf-8") + payload


def _digest(header_text: str, payload: bytes) -> str:
    # covers the metadata too, so a flipped digit in mu_i or dt cannot pass silently
    return hashlib.sha256(header_text.encode("utf-8") + payload).hexdigest()


def loads_trajectory(blob: bytes) -> Trajectory:
    sep = blob.find(b"\n\n")
    if sep < 0:
        raise StoreParseError("missing blank line terminating the header")
    try:
        lines = blob[:sep].decode("utf-8").split("\n")
    except UnicodeDecodeError as exc:
        raise StoreParseError(f"header is not UTF-8: {exc}") from None

    if lines[-1].startswith("sha256="):
        signed = "".join(line + "\n" for line in lines[:-1])
    else:
        signed = None
    meta: Dict[str, str] = {}
    for lineno, line in enumerate(lines, start=1):
        key, eq, value = line.partition("=")
        if not eq or key not in _KEYS:
            raise StoreParseError(f"header line {lineno}: bad record {line!r}")
        if key in meta:
            raise StoreParseError(f"header line {lineno}: duplicate key {key!r}")
        meta[key] = value
    missing = [k for k in _KEYS if k not in meta]
    if missing:
        raise StoreParseError(f"header is missing keys {missing}")

    parsed: Dict[str, Union[int, float]] = {}
    for key in _INT_KEYS:
        try:
            parsed[key] = int(meta[key])
        except ValueError:
            raise StoreParseError(f"header record {key}={meta[key]!r} is not an integer") from None
    for key in _FLOAT_KEYS:
        try:
            parsed[key] = float(meta[key])
        except ValueError:
            raise StoreParseError(f"header record {key}={meta[key]!r} is not a number") from None
    if parsed["format_version"] != FORMAT_VERSION:
        raise StoreParseError(f"unsupported format_version {parsed['format_version']}")
    n_cells, n_steps = int(parsed["n_cells"]), int(parsed["n_steps"])
    if n_cells < 2 or n_steps < 0:
        raise StoreParseError(f"invalid sizes n_cells={n_cells}, n_steps={n_steps}")

    try:
        mesh = Mesh1D(parsed["x_min"], parsed["x_max"], n_cells)
    except InvalidArgumentError as exc:
        raise StoreParseError(f"invalid mesh in header: {exc}") from None

    payload = blob[sep + 2 :]
    expected = (n_steps + 1) * n_cells * _DTYPE.itemsize
    if len(payload) != expected:
        raise StoreIntegrityError(
            f"payload holds {len(payload)} bytes, header announces {expected} "
            f"({n_steps + 1} x {n_cells} float64)"
        )
    if signed is None or _digest(signed, payload) != meta["sha256"]:
        raise StoreIntegrityError("checksum does not match the header and payload")
    values = np.frombuffer(payload, dtype=_DTYPE).reshape(n_steps + 1, n_cells)
    return Trajectory(
        values.astype(np.float64),
        mesh,
        mu_i=float(parsed["mu_i"]),
        nu_i=float(parsed["nu_i"]),
        dt=float(parsed["dt"]),
    )


def save_trajectory(traj: Trajectory, path: Union[str, Path]) -> Path:
    atomic_write(path, dumps_trajectory(traj))
    return Path(path)


def load_trajectory(path: Union[str, Path]) -> Trajectory:
    return loads_trajectory(Path(path).read_bytes())


def trajectory_to_csv(traj: Trajectory, comments=()) -> str:
    """``k,j,value`` rows preceded by a ``# key=value`` metadata block."""
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    for key, value in (
        ("mu_i", traj.mu_i),
        ("nu_i", traj.nu_i),
        ("dt", traj.dt),
        ("n_cells", traj.mesh.n_cells),
        ("x_min", traj.mesh.x_min),
        ("x_max", traj.mesh.x_max),
        ("n_steps", traj.n_steps),
    ):
        buf.write(f"# {key}={value if isinstance(value, int) else format_float(value)}\n")
    buf.write("k,j,value\n")
    for k, row in enumerate(traj.values):
        for j, v in enumerate(row, start=1):
            buf.write(f"{k},{j},{format_float(v)}\n")
    return buf.getvalue()


class SnapshotStore:
    """Trajectories keyed by their parameter, all on one mesh and time step."""

    def __init__(self, trajectories=()):
        self._entries: Dict[float, Trajectory] = {}
        for traj in trajectories:
            self.add(traj)

    def add(self, traj: Trajectory) -> None:
        if traj.mu_i in self._entries:
            raise InvalidArgumentError(f"duplicate snapshot key mu_i={traj.mu_i}")
        if self._entries:
            first = next(iter(self._entries.values()))
            first.mesh.check_same(traj.mesh)
            if first.dt != traj.dt:
                raise IncompatibleDiscretizationError(f"dt mismatch: {first.dt} vs {traj.dt}")
        self._entries[traj.mu_i] = traj

    @classmethod
    def from_paths(cls, paths) -> "SnapshotStore":
        return cls(load_trajectory(p) for p in paths)

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[float]:
        return iter(sorted(self._entries))

    def __getitem__(self, mu_i: float) -> Trajectory:
        return self._entries[mu_i]

    def keys(self):
        return sorted(self._entries)

    @property
    def mesh(self) -> Optional[Mesh1D]:
        return next(iter(self._entries.values())).mesh if self._entries else None

    @property
    def dt(self) -> Optional[float]:
        return next(iter(self._entries.values())).dt if self._entries else None


def select_nearest(store: SnapshotStore, mu: float, model: WaveSpeedModel) -> float:
    """Key whose wavespeed is closest to ``a(mu)``; ties go to the smaller key."""
    if not len(store):
        raise SnapshotNotFoundError("snapshot store is empty")
    a = model.wavespeed(mu)
    return min(store.keys(), key=lambda m: (abs(a - model.wavespeed(m)), m))


def select_best_measured(
    store: SnapshotStore,
    mu: float,
    k: int,
    reference: CellField,
    model: WaveSpeedModel,
) -> Tuple[float, float]:
    """Reconstruct ``(mu, k)`` from every entry and keep the one closest to ``reference``.

    This needs the reference solution itself, so it is only meant for studies of
    how the snapshot choice affects the error, not as an online selector.
    Returns ``(mu_i, e_abs)``; ties go to the smaller key.
    """
    if not len(store):
        raise SnapshotNotFoundError("snapshot store is empty")
    store.mesh.check_same(reference.mesh)
    best = None
    for mu_i in store.keys():
        err = l1_abs_error(rta_reconstruct(store[mu_i], mu, k, model), reference)
        if best is None or err < best[1]:
            best = (mu_i, err)
    return best
