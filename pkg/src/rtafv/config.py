"""
Experiment configuration files (YAML).

Example, reproducing the scalar transport setup::

    problem: transport
    mesh: {x_min: -10, x_max: 10, n_cells: 250}
    initial_condition:
      breakpoints: ["-10/3", "10/3"]
      values: [1, -1, 1]
    model: {alpha: 5, beta: 2, mu_min: 0, mu_max: 1}
    time: {cfl: 0.8, mu_ref: 1.0, final_time: 1.0}
    snapshots: [0.4]
    targets: [0.8]
    times: [0.216, 0.722, 0.814]
    converge: {n_cells: [125, 250, 500, 1000, 2000], mode: final}
    output: out

For ``problem: elasto`` the model block is ``{c0, c1, rho, mu_min, mu_max}`` and the
initial condition has two step functions, ``sigma`` and ``velocity``.
Unknown keys are errors. Numbers may be written as exact fractions (``"-10/3"``).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import yaml

from rtafv.mesh import Mesh1D, PiecewiseConstant, build_mesh, parse_number
from rtafv.systems import ElastoModel
from rtafv.upwind import SolveConfig, TransportModel, cfl_timestep

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "parse_config"]


class ConfigError(ValueError):
    pass


def _check_keys(block: Dict[str, Any], where: str, required: Sequence[str], optional: Sequence[str] = ()) -> None:
    if not isinstance(block, dict):
        raise ConfigError(f"{where}: expected a mapping, got {type(block).__name__}")
    unknown = sorted(set(block) - set(required) - set(optional))
    if unknown:
        raise ConfigError(f"{where}: unknown keys {unknown}")
    missing = [k for k in required if k not in block]
    if missing:
        raise ConfigError(f"{where}: missing keys {missing}")


def _num(value: Any, where: str) -> float:
    try:
        x = parse_number(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ConfigError(f"{where}: {value!r} is not a number") from None
    if not math.isfinite(x):
        raise ConfigError(f"{where}: {value!r} is not finite")
    return x


def _num_list(value: Any, where: str) -> List[float]:
    if value is None:
        return []
    if not isinstance(value, list):
        raise ConfigError(f"{where}: expected a list")
    return [_num(v, f"{where}[{i}]") for i, v in enumerate(value)]


def _int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}: expected an integer, got {value!r}")
    return value


def _step_function(block: Any, where: str) -> PiecewiseConstant:
    _check_keys(block, where, ("values",), ("breakpoints",))
    try:
        return PiecewiseConstant(
            _num_list(block.get("breakpoints", []), f"{where}.breakpoints"),
            _num_list(block["values"], f"{where}.values"),
        )
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None


@dataclass(frozen=True)
class ExperimentConfig:
    problem: str
    x_min: float
    x_max: float
    n_cells: int
    model: Union[TransportModel, ElastoModel]
    initial: Dict[str, PiecewiseConstant]
    cfl: float
    mu_ref: float
    final_time: Optional[float]
    n_steps: Optional[int]
    snapshots: Tuple[float, ...]
    targets: Tuple[float, ...]
    times: Tuple[float, ...] = ()
    converge_n_cells: Tuple[int, ...] = ()
    converge_mode: str = "final"
    output: Optional[str] = None
    digest: str = field(default="", compare=False)

    def mesh(self, n_cells: Optional[int] = None) -> Mesh1D:
        return build_mesh(self.x_min, self.x_max, n_cells or self.n_cells)

    def dt(self, mesh: Mesh1D) -> float:
        return cfl_timestep(self.model, mesh, self.cfl, self.mu_ref)

    def solve_config(self, mesh: Mesh1D) -> SolveConfig:
        dt = self.dt(mesh)
        if self.n_steps is not None:
            return SolveConfig(dt=dt, n_steps=self.n_steps)
        return SolveConfig.from_final_time(dt, self.final_time)


def parse_config(raw: Dict[str, Any], digest: str = "") -> ExperimentConfig:
    _check_keys(
        raw,
        "config",
        ("problem", "mesh", "initial_condition", "model", "time"),
        ("snapshots", "targets", "times", "converge", "output"),
    )
    problem = raw["problem"]
    if problem not in ("transport", "elasto"):
        raise ConfigError(f"problem: expected 'transport' or 'elasto', got {problem!r}")

    mesh = raw["mesh"]
    _check_keys(mesh, "mesh", ("x_min", "x_max", "n_cells"))
    x_min, x_max = _num(mesh["x_min"], "mesh.x_min"), _num(mesh["x_max"], "mesh.x_max")
    n_cells = _int(mesh["n_cells"], "mesh.n_cells")
    if x_max <= x_min or n_cells < 2:
        raise ConfigError("mesh: need x_max > x_min and n_cells >= 2")

    m = raw["model"]
    try:
        if problem == "transport":
            _check_keys(m, "model", ("alpha", "beta"), ("mu_min", "mu_max"))
            model = TransportModel(
                _num(m["alpha"], "model.alpha"),
                _num(m["beta"], "model.beta"),
                _num(m.get("mu_min", 0.0), "model.mu_min"),
                _num(m.get("mu_max", 1.0), "model.mu_max"),
            )
            initial = {"u": _step_function(raw["initial_condition"], "initial_condition")}
        else:
            _check_keys(m, "model", ("c0", "c1", "rho"), ("mu_min", "mu_max"))
            model = ElastoModel(
                _num(m["c0"], "model.c0"),
                _num(m["c1"], "model.c1"),
                _num(m["rho"], "model.rho"),
                _num(m.get("mu_min", 0.0), "model.mu_min"),
                _num(m.get("mu_max", 1.0), "model.mu_max"),
            )
            ic = raw["initial_condition"]
            _check_keys(ic, "initial_condition", ("sigma", "velocity"))
            initial = {
                "sigma": _step_function(ic["sigma"], "initial_condition.sigma"),
                "velocity": _step_function(ic["velocity"], "initial_condition.velocity"),
            }
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"model: {exc}") from None
    for name, pc in initial.items():
        if pc.breakpoints and (pc.breakpoints[0] < x_min or pc.breakpoints[-1] > x_max):
            raise ConfigError(f"initial_condition {name}: breakpoints outside the mesh")

    t = raw["time"]
    _check_keys(t, "time", ("cfl", "mu_ref"), ("final_time", "n_steps"))
    cfl = _num(t["cfl"], "time.cfl")
    if not 0.0 < cfl <= 1.0:
        raise ConfigError(f"time.cfl must lie in (0, 1], got {cfl}")
    mu_ref = _num(t["mu_ref"], "time.mu_ref")
    if ("final_time" in t) == ("n_steps" in t):
        raise ConfigError("time: give exactly one of final_time, n_steps")
    final_time = _num(t["final_time"], "time.final_time") if "final_time" in t else None
    n_steps = _int(t["n_steps"], "time.n_steps") if "n_steps" in t else None
    if (final_time is not None and final_time < 0) or (n_steps is not None and n_steps < 0):
        raise ConfigError("time: horizon must be non-negative")

    snapshots = tuple(_num_list(raw.get("snapshots"), "snapshots"))
    targets = tuple(_num_list(raw.get("targets"), "targets"))
    for name, mus in (("snapshots", snapshots), ("targets", targets), ("time.mu_ref", (mu_ref,))):
        for mu in mus:
            if not model.contains(mu):
                raise ConfigError(f"{name}: {mu} outside [{model.mu_min}, {model.mu_max}]")
    if len(set(snapshots)) != len(snapshots):
        raise ConfigError("snapshots: duplicate values")
    times = tuple(_num_list(raw.get("times"), "times"))
    if any(x < 0 for x in times):
        raise ConfigError("times: must be non-negative")

    conv = raw.get("converge") or {}
    converge_n: Tuple[int, ...] = ()
    mode = "final"
    if conv:
        _check_keys(conv, "converge", ("n_cells",), ("mode",))
        converge_n = tuple(_int(n, "converge.n_cells") for n in conv["n_cells"])
        mode = conv.get("mode", "final")
        if mode not in ("final", "history"):
            raise ConfigError(f"converge.mode: expected 'final' or 'history', got {mode!r}")
        if any(n < 2 for n in converge_n):
            raise ConfigError("converge.n_cells: every entry must be >= 2")

    output = raw.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigError("output: expected a path string")

    return ExperimentConfig(
        problem=problem,
        x_min=x_min,
        x_max=x_max,
        n_cells=n_cells,
        model=model,
        initial=initial,
        cfl=cfl,
        mu_ref=mu_ref,
        final_time=final_time,
        n_steps=n_steps,
        snapshots=snapshots,
        targets=targets,
        times=times,
        converge_n_cells=converge_n,
        converge_mode=mode,
        output=output,
        digest=digest,
    )


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    data = Path(path).read_bytes()
    try:
        raw = yaml.safe_load(data)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from None
    return parse_config(raw, digest=hashlib.sha256(data).hexdigest())
