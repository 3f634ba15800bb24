"""Command-line interface: parse a config, run a solver, write CSV + manifest.

Commands::

    cavitysr exact         -c run.cfg --tmax 100 --points 2000
    cavitysr semiclassical -c run.cfg --method mf
    cavitysr oracle        -c run.cfg --vib-levels 6
    cavitysr sweep         -c run.cfg --axis delta --values=-0.3:0.3:13 --solver mf

Every CSV gets a sibling ``<name>.manifest.json`` recording the parsed
config, solver id, tolerances, code version and wall time.  Numbers are
written with 17 significant digits so files round-trip losslessly;
identical config and flags produce byte-identical CSVs.  The output
directory is the config file's directory unless ``--outdir`` or the
environment variable ``CAVITYSR_OUTDIR`` says otherwise.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (DEFAULT_HI, DEFAULT_LO, DEFAULT_R2, SweepSpec,
                       run_sweep)
from .config import config_echo, load_config
from .errors import CavitySRError

CSV_SCHEMA = "cavitysr-csv v1"


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    return format(float(value), ".16e")


def write_csv(path, kind, solver, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# {CSV_SCHEMA} kind={kind} solver={solver}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_manifest(csv_path, command, argv, config_path, params, init,
                   solver, tolerances, wall_time, n_rows, extra=None):
    manifest = {
        "schema": "cavitysr-manifest-v1",
        "command": command,
        "argv": list(argv),
        "config_path": str(config_path),
        "config": config_echo(params, init),
        "solver": solver,
        "version": __version__,
        "tolerances": tolerances,
        "wall_time_s": wall_time,
        "outputs": [str(csv_path)],
        "n_rows": n_rows,
    }
    if extra:
        manifest.update(extra)
    path = Path(str(csv_path) + ".manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, default=str)
        fh.write("\n")
    return path


def _out_path(args, suffix):
    if args.out:
        return Path(args.out)
    outdir = args.outdir or os.environ.get("CAVITYSR_OUTDIR") \
        or Path(args.config).parent
    stem = Path(args.config).stem
    return Path(outdir) / f"{stem}.{suffix}.csv"


def _time_grid(args):
    if args.points < 1:
        raise CavitySRError("--points must be >= 1")
    if args.tmax <= 0:
        raise CavitySRError("--tmax must be > 0")
    return np.linspace(0.0, args.tmax, args.points)


def _add_common(sub, tmax=100.0, points=2000):
    sub.add_argument("-c", "--config", required=True, help="run config file")
    sub.add_argument("--tmax", type=float, default=tmax,
                     help="final time in fs (default %(default)s)")
    sub.add_argument("--points", type=int, default=points,
                     help="number of output samples (default %(default)s)")
    sub.add_argument("--rtol", type=float, default=None)
    sub.add_argument("--atol", type=float, default=None)
    sub.add_argument("--out", help="output CSV path")
    sub.add_argument("--outdir", help="output directory "
                     "(or env CAVITYSR_OUTDIR)")


def cmd_exact(args, argv):
    from .blocksolver import SolveOptions, solve
    params, init = load_config(args.config)
    opts = SolveOptions(t_grid_fs=_time_grid(args),
                        rtol=args.rtol if args.rtol is not None else 1e-8,
                        atol=args.atol if args.atol is not None else 1e-10,
                        mode=args.mode)
    start = time.perf_counter()
    traj = solve(params, init, opts)
    wall = time.perf_counter() - start
    out = _out_path(args, "exact")
    out.parent.mkdir(parents=True, exist_ok=True)
    rows = zip(traj.times_fs, traj.photon, traj.n_over_n, traj.sz, traj.j2,
               traj.trace_residual)
    solver = f"exact-{args.mode}"
    write_csv(out, "trajectory", solver,
              ["t_fs", "n_mean", "n_over_N", "sz", "j2", "trace_residual"],
              rows)
    write_manifest(out, "exact", argv, args.config, params, init, solver,
                   {"rtol": opts.rtol, "atol": opts.atol}, wall, len(traj))
    print(out)


def cmd_semiclassical(args, argv):
    from .semiclassical import solve_semiclassical
    params, init = load_config(args.config)
    rtol = args.rtol if args.rtol is not None else 1e-9
    atol = args.atol if args.atol is not None else 1e-12
    start = time.perf_counter()
    traj = solve_semiclassical(args.method, params, init, _time_grid(args),
                               rtol=rtol, atol=atol)
    wall = time.perf_counter() - start
    out = _out_path(args, args.method)
    out.parent.mkdir(parents=True, exist_ok=True)
    rows = zip(traj.times_fs, traj.n_over_n, traj.coherence, traj.sz, traj.j2)
    write_csv(out, "trajectory", args.method,
              ["t_fs", "n_over_N", "coherence", "sz", "j2"], rows)
    write_manifest(out, "semiclassical", argv, args.config, params, init,
                   args.method, {"rtol": rtol, "atol": atol}, wall, len(traj))
    print(out)


def cmd_oracle(args, argv):
    from .dense import DenseConfig, evolve
    params, init = load_config(args.config)
    model = args.model
    if model == "auto":
        model = "htc" if (params.huang_rhys > 0 or params.gamma_nu > 0) else "tc"
    cfg = DenseConfig(model=model, n_photon_levels=args.photon_levels,
                      n_vib_levels=args.vib_levels, dim_cap=args.dim_cap)
    rtol = args.rtol if args.rtol is not None else 1e-10
    atol = args.atol if args.atol is not None else 1e-12
    start = time.perf_counter()
    traj = evolve(params, init, _time_grid(args), cfg, rtol=rtol, atol=atol)
    wall = time.perf_counter() - start
    out = _out_path(args, "oracle")
    out.parent.mkdir(parents=True, exist_ok=True)
    header = ["t_fs", "n_mean", "n_over_N", "coherence", "sz", "j2",
              "trace_residual"]
    columns = [traj.times_fs, traj.photon, traj.n_over_n, traj.coherence,
               traj.sz, traj.j2, traj.trace_residual]
    if model == "htc":
        header += ["vib_number", "vib_disp_re", "vib_disp_im"]
        columns += [traj.extras["vib_number"],
                    traj.extras["vib_displacement"].real,
                    traj.extras["vib_displacement"].imag]
    write_csv(out, "trajectory", f"dense-{model}", header, zip(*columns))
    write_manifest(out, "oracle", argv, args.config, params, init,
                   f"dense-{model}", {"rtol": rtol, "atol": atol}, wall,
                   len(traj),
                   extra={"dense_config": {
                       "model": model, "n_photon_levels": cfg.n_photon_levels,
                       "n_vib_levels": cfg.n_vib_levels,
                       "dim_cap": cfg.dim_cap}})
    print(out)


def _parse_values(text):
    """Comma list '0,0.1,0.2' or range 'start:stop:count'."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise CavitySRError("--values range must be start:stop:count")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise CavitySRError("--values range count must be >= 1")
        return np.linspace(start, stop, count).tolist()
    values = [float(v) for v in text.split(",") if v.strip() != ""]
    if not values:
        raise CavitySRError("--values list is empty")
    return values


def cmd_sweep(args, argv):
    params, init = load_config(args.config)
    values = _parse_values(args.values)
    rtol = args.rtol if args.rtol is not None else 1e-9
    atol = args.atol if args.atol is not None else 1e-12
    spec = SweepSpec(axis=args.axis, values=values, solver=args.solver,
                     params=params, init=init, t_grid_fs=_time_grid(args),
                     lo=args.lo, hi=args.hi, r2_min=args.r2_min,
                     rtol=rtol, atol=atol)
    start = time.perf_counter()
    points = run_sweep(spec, jobs=args.jobs)
    wall = time.perf_counter() - start
    out = _out_path(args, f"sweep-{spec.axis}")
    out.parent.mkdir(parents=True, exist_ok=True)
    rows = []
    for pt in points:
        fit = pt.fit
        rows.append([
            pt.value,
            fit.tau_fs if fit and fit.well_defined else "",
            fit.amplitude if fit else "",
            fit.r_squared if fit else "",
            bool(fit and fit.well_defined),
            fit.window[0] if fit else "",
            fit.window[1] if fit else "",
            fit.n_points if fit else "",
            pt.peak_n_over_n,
            pt.t_peak_fs,
            pt.error or "",
        ])
    write_csv(out, "sweep", f"{args.solver}-{spec.axis}",
              ["value", "tau_fs", "amplitude", "r2", "well_defined",
               "window_t0_fs", "window_t1_fs", "n_points", "peak_n_over_N",
               "t_peak_fs", "error"], rows)
    write_manifest(out, "sweep", argv, args.config, params, init,
                   args.solver, {"rtol": rtol, "atol": atol}, wall,
                   len(points),
                   extra={"sweep": {"axis": spec.axis, "values": values,
                                    "lo": spec.lo, "hi": spec.hi,
                                    "r2_min": spec.r2_min}})
    print(out)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cavitysr",
        description="Dynamical superradiance solvers for N emitters in a "
                    "lossy cavity")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    p_exact = subs.add_parser("exact", help="exact block solver (TC, S = 0)")
    _add_common(p_exact)
    p_exact.add_argument("--mode", choices=("joint", "sequential"),
                         default="joint")
    p_exact.set_defaults(func=cmd_exact)

    p_semi = subs.add_parser("semiclassical",
                             help="mean-field or cumulant dynamics")
    _add_common(p_semi)
    p_semi.add_argument("--method", choices=("mf", "c2"), required=True)
    p_semi.set_defaults(func=cmd_semiclassical)

    p_oracle = subs.add_parser("oracle", help="dense reference solver")
    _add_common(p_oracle, points=500)
    p_oracle.add_argument("--model", choices=("auto", "tc", "htc"),
                          default="auto")
    p_oracle.add_argument("--photon-levels", type=int, default=None)
    p_oracle.add_argument("--vib-levels", type=int, default=5)
    p_oracle.add_argument("--dim-cap", type=int, default=20_000)
    p_oracle.set_defaults(func=cmd_oracle)

    p_sweep = subs.add_parser("sweep", help="risetime parameter sweep")
    _add_common(p_sweep, tmax=300.0, points=3001)
    p_sweep.add_argument("--axis", required=True,
                         help="S | gamma_phi | delta | theta")
    p_sweep.add_argument("--values", required=True,
                         help="comma list or start:stop:count")
    p_sweep.add_argument("--solver", choices=("mf", "c2", "exact"),
                         default="mf")
    p_sweep.add_argument("--lo", type=float, default=DEFAULT_LO)
    p_sweep.add_argument("--hi", type=float, default=DEFAULT_HI)
    p_sweep.add_argument("--r2-min", type=float, default=DEFAULT_R2)
    p_sweep.add_argument("--jobs", type=int, default=1)
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args, argv)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CavitySRError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # solver-side failure
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
