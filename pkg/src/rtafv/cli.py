"""
Command line front end.

::

    rtafv solve       --config exp.yaml [--out DIR] [--csv]
    rtafv reconstruct --config exp.yaml --snapshot traj.rtafv --mu 0.8 (--k 40 | --time 0.5)
    rtafv converge    --config exp.yaml [--jobs 4]
    rtafv elasto      --config elasto.yaml
    rtafv dict        --config exp.yaml [--reference]

Exit codes: 0 success, 2 bad configuration or arguments, 3 incompatible
discretization, 4 CFL violation, 5 unreadable trajectory file.
"""

from __future__ import annotations

import argparse
import io
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Iterable, List, Optional, Sequence

from rtafv.config import ConfigError, ExperimentConfig, load_config
from rtafv.errors import (
    CFLViolationError,
    IncompatibleDiscretizationError,
    InvalidArgumentError,
    StoreIntegrityError,
    StoreParseError,
)
from rtafv.mesh import field_to_csv, format_float
from rtafv.metrics import fit_convergence_rate, l1_abs_error, l1_rel_error
from rtafv.rta import rta_reconstruct, rta_shift_index
from rtafv.store import (
    SnapshotStore,
    atomic_write,
    load_trajectory,
    save_trajectory,
    select_best_measured,
    select_nearest,
    trajectory_to_csv,
)
from rtafv.systems import project_system, rta_elasto_reconstruct, run_elasto_trajectory
from rtafv.upwind import SolveConfig, courant_number, run_trajectory

log = logging.getLogger("rtafv")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INCOMPATIBLE = 3
EXIT_CFL = 4
EXIT_STORE = 5


class CommandError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _fmt(x: float) -> str:
    return format_float(x)


def _out_dir(args, cfg: ExperimentConfig) -> Path:
    out = Path(args.out or cfg.output or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _comments(cfg: ExperimentConfig, *extra: str) -> List[str]:
    return [f"config_sha256={cfg.digest}", *extra]


def _pmap(fn: Callable, items: Sequence, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _time_index(t: float, dt: float) -> int:
    k = int(round(t / dt))
    residual = t - k * dt
    print(f"time {_fmt(t)} -> k={k} (t^k={_fmt(k * dt)}, residual {residual:.3e} s)", file=sys.stderr)
    return k


def _output_indices(cfg: ExperimentConfig, solve: SolveConfig) -> List[int]:
    if not cfg.times:
        return [solve.n_steps]
    ks = [_time_index(t, solve.dt) for t in cfg.times]
    for t, k in zip(cfg.times, ks):
        if k > solve.n_steps:
            raise CommandError(f"time {t} (k={k}) beyond horizon n_steps={solve.n_steps}", EXIT_CONFIG)
    return ks


def _require(cfg: ExperimentConfig, problem: str) -> None:
    if cfg.problem != problem:
        raise CommandError(f"this command needs problem: {problem}, config has {cfg.problem}", EXIT_CONFIG)


def _solve_transport(cfg: ExperimentConfig, mu: float, n_cells: Optional[int] = None):
    mesh = cfg.mesh(n_cells)
    solve = cfg.solve_config(mesh)
    nu = courant_number(cfg.model, mu, solve.dt, mesh)
    if abs(nu) > 1.0:
        raise CommandError(f"CFL violation for mu={_fmt(mu)}: nu={_fmt(nu)}", EXIT_CFL)
    return run_trajectory(cfg.model, mu, cfg.initial["u"], mesh, solve)


def _solve_elasto(cfg: ExperimentConfig, mu: float, n_cells: Optional[int] = None):
    mesh = cfg.mesh(n_cells)
    solve = cfg.solve_config(mesh)
    U0 = project_system(cfg.initial["sigma"], cfg.initial["velocity"], mesh)
    nu = cfg.model.celerity(mu) * solve.dt / mesh.dx
    if abs(nu) > 1.0:
        raise CommandError(f"CFL violation for mu={_fmt(mu)}: nu={_fmt(nu)}", EXIT_CFL)
    return run_elasto_trajectory(cfg.model, mu, U0, mesh, solve)


def cmd_solve(args, cfg: ExperimentConfig) -> List[Path]:
    if not cfg.snapshots:
        log.warning("no snapshot parameters listed; nothing to do")
        return []
    out = _out_dir(args, cfg)
    written: List[Path] = []
    if cfg.problem == "transport":
        trajs = _pmap(lambda mu: _solve_transport(cfg, mu), cfg.snapshots, args.jobs)
        for mu, traj in zip(cfg.snapshots, trajs):
            path = save_trajectory(traj, out / f"traj_mu{_fmt(mu)}.rtafv")
            written.append(path)
            if args.csv:
                csv_path = out / f"traj_mu{_fmt(mu)}.csv"
                atomic_write(csv_path, trajectory_to_csv(traj, _comments(cfg)))
                written.append(csv_path)
    else:
        offs = _pmap(lambda mu: _solve_elasto(cfg, mu), cfg.snapshots, args.jobs)
        for mu, off in zip(cfg.snapshots, offs):
            for name, traj in (("w1", off.w1), ("w2", off.w2)):
                path = save_trajectory(traj, out / f"elasto_mu{_fmt(mu)}_{name}.rtafv")
                written.append(path)
                if args.csv:
                    csv_path = out / f"elasto_mu{_fmt(mu)}_{name}.csv"
                    atomic_write(csv_path, trajectory_to_csv(traj, _comments(cfg)))
                    written.append(csv_path)
    for p in written:
        print(p)
    return written


def cmd_reconstruct(args, cfg: ExperimentConfig) -> List[Path]:
    _require(cfg, "transport")
    traj = load_trajectory(args.snapshot)
    mesh = cfg.mesh()
    if traj.mesh != mesh:
        raise IncompatibleDiscretizationError(f"snapshot mesh {traj.mesh} differs from config mesh {mesh}")
    dt = cfg.dt(mesh)
    if traj.dt != dt:
        raise IncompatibleDiscretizationError(f"snapshot dt={_fmt(traj.dt)} differs from config dt={_fmt(dt)}")
    if args.k is not None:
        k = args.k
    else:
        k = _time_index(args.time, traj.dt)
    if not 0 <= k <= traj.n_steps:
        raise CommandError(f"time index k={k} outside [0, {traj.n_steps}]", EXIT_CONFIG)

    phi = rta_reconstruct(traj, args.mu, k, cfg.model)
    idx = rta_shift_index(traj, args.mu, k, cfg.model)
    meta = {
        "mu": args.mu,
        "mu_i": traj.mu_i,
        "k": k,
        "t": k * traj.dt,
        "p": idx.p,
        "theta": idx.theta,
    }
    out = _out_dir(args, cfg)
    stem = f"reconstruct_mu{_fmt(args.mu)}_mui{_fmt(traj.mu_i)}_k{k}"
    meta_lines = [f"{key}={_fmt(v) if isinstance(v, float) else v}" for key, v in meta.items()]
    csv_path = out / f"{stem}.csv"
    meta_path = out / f"{stem}.meta"
    atomic_write(csv_path, field_to_csv(phi, _comments(cfg, *meta_lines)))
    atomic_write(meta_path, "".join(line + "\n" for line in meta_lines))
    print(csv_path)
    print(meta_path)
    return [csv_path, meta_path]


def _converge_final(cfg: ExperimentConfig, mu: float, mu_i: float, jobs: int) -> str:
    def one(n):
        snap = _solve_transport(cfg, mu_i, n)
        ref = _solve_transport(cfg, mu, n)
        k = snap.n_steps
        phi = rta_reconstruct(snap, mu, k, cfg.model)
        return n, snap.mesh.dx, l1_abs_error(phi, ref.field(k)), l1_rel_error(phi, ref.field(k))

    rows = _pmap(one, list(cfg.converge_n_cells), jobs)
    buf = io.StringIO()
    for c in _comments(cfg, f"mu={_fmt(mu)}", f"mu_i={_fmt(mu_i)}"):
        buf.write(f"# {c}\n")
    buf.write("n_cells,dx,e_abs,e_rel\n")
    for n, dx, ea, er in rows:
        buf.write(f"{n},{_fmt(dx)},{_fmt(ea)},{_fmt(er)}\n")
    if len(rows) >= 2 and all(r[2] > 0 and r[3] > 0 for r in rows):
        ra, _ = fit_convergence_rate([(r[1], r[2]) for r in rows])
        rr, _ = fit_convergence_rate([(r[1], r[3]) for r in rows])
        buf.write(f"rate,,{_fmt(ra)},{_fmt(rr)}\n")
    else:
        log.warning("rate not fitted for mu=%s mu_i=%s (need >= 2 meshes with nonzero error)", mu, mu_i)
    return buf.getvalue()


def _converge_history(cfg: ExperimentConfig, mu: float, mu_i: float, n: int) -> str:
    snap = _solve_transport(cfg, mu_i, n)
    ref = _solve_transport(cfg, mu, n)
    buf = io.StringIO()
    for c in _comments(cfg, f"mu={_fmt(mu)}", f"mu_i={_fmt(mu_i)}", f"n_cells={n}"):
        buf.write(f"# {c}\n")
    buf.write("k,t,e_rel\n")
    for k in range(snap.n_steps + 1):
        e = l1_rel_error(rta_reconstruct(snap, mu, k, cfg.model), ref.field(k))
        buf.write(f"{k},{_fmt(k * snap.dt)},{_fmt(e)}\n")
    return buf.getvalue()


def cmd_converge(args, cfg: ExperimentConfig) -> List[Path]:
    _require(cfg, "transport")
    if not cfg.converge_n_cells:
        raise CommandError("config has no converge.n_cells list", EXIT_CONFIG)
    out = _out_dir(args, cfg)
    written = []
    pairs = [(mu, mu_i) for mu_i in cfg.snapshots for mu in cfg.targets]
    if cfg.converge_mode == "final":
        texts = _pmap(lambda pr: _converge_final(cfg, pr[0], pr[1], 1), pairs, args.jobs)
        for (mu, mu_i), text in zip(pairs, texts):
            path = out / f"converge_mu{_fmt(mu)}_mui{_fmt(mu_i)}.csv"
            atomic_write(path, text)
            written.append(path)
    else:
        items = [(mu, mu_i, n) for mu, mu_i in pairs for n in cfg.converge_n_cells]
        texts = _pmap(lambda it: _converge_history(cfg, *it), items, args.jobs)
        for (mu, mu_i, n), text in zip(items, texts):
            path = out / f"history_mu{_fmt(mu)}_mui{_fmt(mu_i)}_N{n}.csv"
            atomic_write(path, text)
            written.append(path)
    for p in written:
        print(p)
    return written


def _elasto_csv(cfg, rows: Iterable, extra: Sequence[str]) -> str:
    buf = io.StringIO()
    for c in _comments(cfg, *extra):
        buf.write(f"# {c}\n")
    buf.write("k,j,x_center,sigma,velocity,w1,w2\n")
    for k, U, W in rows:
        xc = U.mesh.centers
        cols = (U.first.values, U.second.values, W.first.values, W.second.values)
        for j in range(U.mesh.n_cells):
            vals = ",".join(_fmt(c[j]) for c in cols)
            buf.write(f"{k},{j + 1},{_fmt(xc[j])},{vals}\n")
    return buf.getvalue()


def cmd_elasto(args, cfg: ExperimentConfig) -> List[Path]:
    _require(cfg, "elasto")
    if not cfg.snapshots or not cfg.targets:
        log.warning("elasto needs snapshots and targets; nothing to do")
        return []
    out = _out_dir(args, cfg)
    offs = dict(zip(cfg.snapshots, _pmap(lambda mu: _solve_elasto(cfg, mu), cfg.snapshots, args.jobs)))
    refs = dict(zip(cfg.targets, _pmap(lambda mu: _solve_elasto(cfg, mu), cfg.targets, args.jobs)))
    ks = _output_indices(cfg, cfg.solve_config(cfg.mesh()))
    written = []
    for mu, ref in refs.items():
        rows = [(k, ref.conservative_field(k), ref.characteristic_field(k)) for k in ks]
        path = out / f"elasto_fv_mu{_fmt(mu)}.csv"
        atomic_write(path, _elasto_csv(cfg, rows, [f"mu={_fmt(mu)}", "source=fv"]))
        written.append(path)
        for mu_i, off in offs.items():
            rows = []
            for k in ks:
                U, W = rta_elasto_reconstruct(off, cfg.model, mu, k)
                rows.append((k, U, W))
            path = out / f"elasto_rta_mu{_fmt(mu)}_mui{_fmt(mu_i)}.csv"
            atomic_write(path, _elasto_csv(cfg, rows, [f"mu={_fmt(mu)}", f"mu_i={_fmt(mu_i)}", "source=rta"]))
            written.append(path)
    for p in written:
        print(p)
    return written


def cmd_dict(args, cfg: ExperimentConfig) -> List[Path]:
    _require(cfg, "transport")
    if args.snapshot:
        store = SnapshotStore.from_paths(args.snapshot)
        mesh = cfg.mesh()
        if store.mesh != mesh or store.dt != cfg.dt(mesh):
            raise IncompatibleDiscretizationError("snapshot files do not match the config discretization")
    else:
        store = SnapshotStore(_pmap(lambda mu: _solve_transport(cfg, mu), cfg.snapshots, args.jobs))
    if not len(store):
        raise CommandError("no snapshots available for the dictionary", EXIT_CONFIG)
    solve = cfg.solve_config(store.mesh)
    horizon = min(store[m].n_steps for m in store.keys())
    ks = _output_indices(cfg, SolveConfig(solve.dt, horizon))

    buf = io.StringIO()
    for c in _comments(cfg, f"mode={'measured' if args.reference else 'nearest'}"):
        buf.write(f"# {c}\n")
    buf.write("mu,k,mu_i,e_abs\n")
    for mu in cfg.targets:
        if args.reference:
            ref = run_trajectory(cfg.model, mu, cfg.initial["u"], store.mesh, SolveConfig(solve.dt, horizon))
        for k in ks:
            if args.reference:
                key, err = select_best_measured(store, mu, k, ref.field(k), cfg.model)
                buf.write(f"{_fmt(mu)},{k},{_fmt(key)},{_fmt(err)}\n")
            else:
                key = select_nearest(store, mu, cfg.model)
                buf.write(f"{_fmt(mu)},{k},{_fmt(key)},\n")
    out = _out_dir(args, cfg)
    path = out / f"dict_{'measured' if args.reference else 'nearest'}.csv"
    atomic_write(path, buf.getvalue())
    sys.stdout.write(buf.getvalue().split("mu,k,mu_i,e_abs\n", 1)[1])
    print(path)
    return [path]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="experiment YAML file")
    common.add_argument("--out", help="output directory (default: config 'output' or cwd)")
    common.add_argument("--jobs", type=int, default=1, help="worker threads for independent solves")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="rtafv", description=__doc__.split("\n\n")[0].strip())
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="compute and store snapshot trajectories")
    p.add_argument("--csv", action="store_true", help="also dump k,j,value CSV files")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("reconstruct", parents=[common], help="RTA reconstruction from one snapshot")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--mu", type=float, required=True)
    when = p.add_mutually_exclusive_group(required=True)
    when.add_argument("--k", type=int)
    when.add_argument("--time", type=float)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("converge", parents=[common], help="mesh refinement study of the RTA error")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("elasto", parents=[common], help="elastodynamics RTA vs direct FV")
    p.set_defaults(func=cmd_elasto)

    p = sub.add_parser("dict", parents=[common], help="pick a snapshot for each target")
    p.add_argument("--reference", action="store_true", help="select by measured error against a direct solve")
    p.add_argument("--snapshot", nargs="*", help="trajectory files (default: solve config snapshots)")
    p.set_defaults(func=cmd_dict)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    if args.jobs < 1:
        log.error("--jobs must be >= 1")
        return EXIT_CONFIG
    try:
        cfg = load_config(args.config)
        args.func(args, cfg)
    except (ConfigError, InvalidArgumentError, FileNotFoundError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except IncompatibleDiscretizationError as exc:
        log.error("incompatible discretization: %s", exc)
        return EXIT_INCOMPATIBLE
    except CFLViolationError as exc:
        log.error("%s", exc)
        return EXIT_CFL
    except (StoreParseError, StoreIntegrityError) as exc:
        log.error("cannot read trajectory: %s", exc)
        return EXIT_STORE
    except CommandError as exc:
        log.error("%s", exc)
        return exc.code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
