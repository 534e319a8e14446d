"""Command line front end.

Four commands, each driven by a JSON config:

  simulate    --config f   forward integration, writes a trajectory CSV
  solve       --config f   maneuver solve, writes trajectory CSV + summary JSON
  verify      [--filter s] runs the invariant suite, prints a pass/fail table
  convergence --config f   planar error study over a list of N values

All outputs land under --out (default: current directory), named by the
config's out_prefix.  Runs are deterministic: the same config produces
byte-identical files.  Exit codes: 0 success, 1 failed verify checks,
2 config errors, 3 solver non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import dynamics, liealg, optctrl, verify
from .nlsolve import SolverOptions

CSV_HEADER = ["k", "t", "R11", "R12", "R13", "R21", "R22", "R23",
              "R31", "R32", "R33", "wx", "wy", "wz", "tx", "ty", "tz"]


class ConfigError(ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def _fmt(x: float) -> str:
    # 17 significant digits: loss-free float64 round trip
    return "%.17g" % x


def write_trajectory_csv(path, traj: dynamics.DiscreteTrajectory) -> None:
    """Row k holds R_k (row-major), W_k (blank in the final row, which has
    no velocity), and tau_k."""
    n = traj.n_steps
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for k in range(n + 1):
            row = [str(k), _fmt(k * traj.h)]
            row += [_fmt(x) for x in traj.attitudes[k].ravel()]
            if k < n:
                row += [_fmt(x) for x in traj.omegas[k]]
            else:
                row += ["", "", ""]
            row += [_fmt(x) for x in traj.torques[k]]
            writer.writerow(row)


def read_trajectory_csv(path) -> dynamics.DiscreteTrajectory:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header: {header}")
        rows = list(reader)
    n = len(rows) - 1
    if n < 1:
        raise ValueError("trajectory CSV must hold at least two rows")
    attitudes = np.empty((n + 1, 3, 3))
    omegas = np.empty((n, 3))
    torques = np.empty((n + 1, 3))
    ts = np.empty(n + 1)
    for k, row in enumerate(rows):
        ts[k] = float(row[1])
        attitudes[k] = np.array([float(x) for x in row[2:11]]).reshape(3, 3)
        if k < n:
            omegas[k] = [float(x) for x in row[11:14]]
        torques[k] = [float(x) for x in row[14:17]]
    h = ts[1] - ts[0] if n >= 1 else 0.0
    return dynamics.DiscreteTrajectory(h=h, attitudes=attitudes,
                                       omegas=omegas, torques=torques)


def _require(cfg: dict, field: str, kind=None):
    if field not in cfg:
        raise ConfigError(field, "missing required field")
    value = cfg[field]
    if kind is not None and not isinstance(value, kind):
        raise ConfigError(field, f"expected {kind}, got {type(value).__name__}")
    return value


def _vector3(cfg, field) -> np.ndarray:
    raw = _require(cfg, field, list)
    if len(raw) != 3 or not all(isinstance(x, (int, float)) for x in raw):
        raise ConfigError(field, "expected a list of 3 numbers")
    return np.array(raw, dtype=float)


def _attitude(cfg, field) -> np.ndarray:
    raw = _require(cfg, field, dict)
    if "axis_angle" in raw:
        v = raw["axis_angle"]
        if not (isinstance(v, list) and len(v) == 3):
            raise ConfigError(field, "axis_angle must be a list of 3 numbers")
        return liealg.exp_so3(np.array(v, dtype=float))
    if "matrix" in raw:
        try:
            return liealg.require_rotation(raw["matrix"], tol=1e-8)
        except ValueError as err:
            raise ConfigError(field, str(err)) from err
    raise ConfigError(field, "attitude needs either 'axis_angle' or 'matrix'")


def _inertia(cfg) -> liealg.InertiaModel:
    raw = _require(cfg, "inertia", list)
    try:
        return liealg.InertiaModel.from_operator_matrix(raw)
    except (liealg.NotPositiveDefinite, ValueError) as err:
        raise ConfigError("inertia", str(err)) from err


def _torque_profile(cfg, field="torque", planar=False):
    raw = cfg.get(field, {"kind": "zero"})
    if not isinstance(raw, dict) or "kind" not in raw:
        raise ConfigError(field, "expected an object with a 'kind'")
    kind = raw["kind"]
    if kind == "zero":
        return (lambda t: 0.0) if planar else dynamics.zero_torque()
    if kind == "sine":
        amplitude = float(raw.get("amplitude", 1.0))
        frequency = float(raw.get("frequency", 1.0))  # rad/s
        if planar:
            return lambda t: amplitude * np.sin(frequency * t)
        if "axis" not in raw:
            raise ConfigError(field, "sine torque needs an 'axis'")
        return dynamics.sine_torque(amplitude, frequency, raw["axis"])
    raise ConfigError(field, f"unknown torque kind {kind!r}")


def _positive_int(cfg, field) -> int:
    value = _require(cfg, field)
    if not isinstance(value, int) or value < 1:
        raise ConfigError(field, "expected a positive integer")
    return value


def _positive_float(cfg, field) -> float:
    value = _require(cfg, field)
    if not isinstance(value, (int, float)) or value <= 0:
        raise ConfigError(field, "expected a positive number")
    return float(value)


def _load_config(path, expected_mode: str) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as err:
        raise ConfigError("config", f"cannot read {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise ConfigError("config", f"invalid JSON at line {err.lineno}, "
                                    f"column {err.colno}: {err.msg}") from err
    if not isinstance(cfg, dict):
        raise ConfigError("config", "top level must be an object")
    mode = cfg.get("mode", expected_mode)
    if mode != expected_mode:
        raise ConfigError("mode", f"config is for {mode!r}, command is "
                                  f"{expected_mode!r}")
    return cfg


def _solver_options(cfg) -> tuple[SolverOptions, bool]:
    raw = cfg.get("solver", {})
    if not isinstance(raw, dict):
        raise ConfigError("solver", "expected an object")
    opts = SolverOptions(tol=float(raw.get("tol", 1e-9)),
                         max_iter=int(raw.get("max_iter", 100)))
    return opts, bool(raw.get("continuation", True))


def _out_path(out_dir, prefix, suffix) -> str:
    os.makedirs(out_dir, exist_ok=True)
    return os.path.join(out_dir, f"{prefix}{suffix}")


def _cmd_simulate(cfg, out_dir) -> int:
    inertia = _inertia(cfg)
    n = _positive_int(cfg, "N")
    h = _positive_float(cfg, "h")
    state = dynamics.RigidBodyState(_attitude(cfg, "initial_attitude"),
                                    _vector3(cfg, "initial_omega"))
    torque = _torque_profile(cfg)
    prefix = cfg.get("out_prefix", "simulate")
    traj = dynamics.dlga_simulate(state, torque, inertia, h, n)
    path = _out_path(out_dir, prefix, "_trajectory.csv")
    write_trajectory_csv(path, traj)
    print(f"wrote {path}")
    return 0


def _cmd_solve(cfg, out_dir) -> int:
    inertia = _inertia(cfg)
    spec = optctrl.ManeuverSpec(r0=_attitude(cfg, "r0"),
                                rN=_attitude(cfg, "rN"),
                                omega0=_vector3(cfg, "omega0"),
                                omegaNm1=_vector3(cfg, "omegaNm1"),
                                N=_positive_int(cfg, "N"),
                                h=_positive_float(cfg, "h"),
                                inertia=inertia)
    options, continuation = _solver_options(cfg)
    prefix = cfg.get("out_prefix", "solve")
    try:
        sol = optctrl.solve(spec, options, continuation=continuation)
    except optctrl.NoConvergence as err:
        print(f"solve failed: best residual {err.best_residual:.3e} "
              f"after {err.iterations} iterations", file=sys.stderr)
        return 3
    report = optctrl.multiplier_check(sol, spec)
    csv_path = _out_path(out_dir, prefix, "_trajectory.csv")
    write_trajectory_csv(csv_path, sol.trajectory)
    summary = {
        "converged": True,
        "cost": sol.cost,
        "residual_norm": sol.residual_norm,
        "iterations": sol.iterations,
        "multiplier_consistency": report.max_consistency_residual,
        "N": spec.N,
        "h": spec.h,
    }
    json_path = _out_path(out_dir, prefix, "_summary.json")
    with open(json_path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {csv_path}")
    print(f"wrote {json_path}")
    return 0


def _cmd_convergence(cfg, out_dir) -> int:
    inertia_scalar = _positive_float(cfg, "inertia_scalar")
    theta0 = float(_require(cfg, "theta0"))
    omega0 = float(_require(cfg, "omega0"))
    total_time = _positive_float(cfg, "T")
    ns = _require(cfg, "Ns", list)
    if not ns or not all(isinstance(n, int) and n > 1 for n in ns):
        raise ConfigError("Ns", "expected a list of integers > 1")
    torque = _torque_profile(cfg, planar=True)
    prefix = cfg.get("out_prefix", "convergence")

    rows = []
    for n in ns:
        h = total_time / n
        traj = dynamics.so2_simulate(theta0, omega0, inertia_scalar, torque, h, n)
        ref = dynamics.rk4_planar_reference(theta0, omega0, inertia_scalar,
                                            torque, total_time, n)
        theta_err = float(np.abs(traj.thetas - ref[0]).max())
        omega_err = float(np.abs(traj.omegas - ref[1][:n]).max())
        rows.append((n, theta_err, omega_err))

    path = _out_path(out_dir, prefix, "_errors.csv")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["N", "max_theta_error", "max_omega_error"])
        for n, te, we in rows:
            writer.writerow([str(n), _fmt(te), _fmt(we)])
    print(f"wrote {path}")
    return 0


def _cmd_verify(name_filter, out_dir) -> int:
    results = verify.run_checks(name_filter)
    if not results:
        print(f"no checks match filter {name_filter!r}", file=sys.stderr)
        return 2
    width = max(len(r.name) for r in results)
    failed = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        failed += not r.passed
        print(f"{status}  {r.name:<{width}}  {r.detail}")
    print(f"{len(results) - failed}/{len(results)} checks passed")
    if out_dir is not None:
        path = _out_path(out_dir, "log_so3", "_vectors.csv")
        verify.write_log_test_vectors(path)
        print(f"wrote {path}")
    return 0 if failed == 0 else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="lie-dmoc",
        description="Structure-preserving rigid-body attitude dynamics and "
                    "minimum-torque maneuver solver.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="forward variational integration")
    p_sim.add_argument("--config", required=True)
    p_sim.add_argument("--out", default=".")

    p_solve = sub.add_parser("solve", help="minimum-torque maneuver solve")
    p_solve.add_argument("--config", required=True)
    p_solve.add_argument("--out", default=".")

    p_verify = sub.add_parser("verify", help="run the invariant suite")
    p_verify.add_argument("--filter", default=None)
    p_verify.add_argument("--out", default=None,
                          help="also write the log-map test-vector CSV here")

    p_conv = sub.add_parser("convergence", help="planar error study")
    p_conv.add_argument("--config", required=True)
    p_conv.add_argument("--out", default=".")

    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            return _cmd_simulate(_load_config(args.config, "simulate"), args.out)
        if args.command == "solve":
            return _cmd_solve(_load_config(args.config, "solve"), args.out)
        if args.command == "convergence":
            return _cmd_convergence(_load_config(args.config, "convergence"),
                                    args.out)
        return _cmd_verify(args.filter, args.out)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
