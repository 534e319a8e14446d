"""Named invariant checks behind the `verify` CLI command.

Each check is independent, seeded, and fast; together they cover the
algebra identities, group-structure preservation, the planar reduction,
integrator orders, and the optimality-system wiring.  The runner also
emits a log-map test-vector file that downstream plotting tools use to
validate their own log implementation against this one.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import dynamics, liealg, nlsolve, optctrl

_REFERENCE_INERTIA = [[13.25, -7.80, -11.40],
                  [-7.80, 16.25, 4.71],
                  [-11.40, 4.71, 18.37]]


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def _rand_units(rng, n):
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _check_roundtrips():
    rng = np.random.default_rng(101)
    vs = rng.uniform(-5.0, 5.0, size=(200, 3))
    hv = np.abs(liealg.vee(liealg.hat(vs)) - vs).max()
    axes = _rand_units(rng, 200)
    angles = rng.uniform(0.0, np.pi - 2e-6, size=200)
    worst = 0.0
    for axis, ang in zip(axes, angles):
        v = ang * axis
        worst = max(worst, np.abs(liealg.log_so3(liealg.exp_so3(v)) - v).max())
    ok = hv == 0.0 and worst <= 1e-10
    return ok, f"vee.hat exact={hv == 0.0}, exp.log worst {worst:.2e}"


def _check_exp_group():
    rng = np.random.default_rng(102)
    worst_orth = worst_det = worst_hom = 0.0
    for v in rng.uniform(-10.0, 10.0, size=(200, 3)):
        if np.linalg.norm(v) > 10.0:
            v = 10.0 * v / np.linalg.norm(v)
        R = liealg.exp_so3(v)
        worst_orth = max(worst_orth, liealg.orthogonality_error(R))
        worst_det = max(worst_det, abs(np.linalg.det(R) - 1.0))
        a, b = rng.uniform(-1.0, 1.0, 2)
        lhs = liealg.exp_so3(a * v) @ liealg.exp_so3(b * v)
        rhs = liealg.exp_so3((a + b) * v)
        worst_hom = max(worst_hom, np.abs(lhs - rhs).max())
    ok = worst_orth < 1e-12 and worst_det < 1e-12 and worst_hom < 1e-12
    return ok, (f"orth {worst_orth:.2e}, det {worst_det:.2e}, "
                f"hom {worst_hom:.2e}")


def _check_self_adjoint():
    rng = np.random.default_rng(103)
    model = liealg.InertiaModel.from_operator_matrix(_REFERENCE_INERTIA)
    worst = 0.0
    for _ in range(1000):
        xi, om = rng.uniform(-2.0, 2.0, (2, 3))
        lhs = liealg.inertia_apply(model, xi) @ om
        rhs = liealg.inertia_apply(model, om) @ xi
        worst = max(worst, abs(lhs - rhs))
    return worst <= 1e-12, f"worst asymmetry {worst:.2e}"


def _check_ad_duality():
    rng = np.random.default_rng(104)
    worst = 0.0
    for _ in range(1000):
        u, p, w = rng.uniform(-2.0, 2.0, (3, 3))
        lhs = liealg.ad_star(u, p) @ w
        rhs = p @ np.cross(u, w)
        worst = max(worst, abs(lhs - rhs))
    return worst <= 1e-12, f"worst duality defect {worst:.2e}"


def _check_group_drift():
    rng = np.random.default_rng(105)
    model = liealg.InertiaModel.from_operator_matrix(_REFERENCE_INERTIA)
    worst = 0.0
    for _ in range(3):
        state = dynamics.RigidBodyState(
            liealg.exp_so3(rng.uniform(-1.5, 1.5, 3)),
            rng.uniform(-0.5, 0.5, 3))
        torque = dynamics.sine_torque(rng.uniform(0.1, 1.0),
                                      rng.uniform(0.2, 2.0),
                                      _rand_units(rng, 1)[0])
        traj = dynamics.dlga_simulate(state, torque, model, 0.1, 128)
        worst = max(worst, max(liealg.orthogonality_error(R)
                               for R in traj.attitudes))
    return worst < 1e-12, f"worst orthogonality drift {worst:.2e}"


def _check_momentum_update():
    rng = np.random.default_rng(106)
    model = liealg.InertiaModel.from_operator_matrix(_REFERENCE_INERTIA)
    state = dynamics.RigidBodyState(np.eye(3), rng.uniform(-0.5, 0.5, 3))
    torque = dynamics.sine_torque(0.8, 1.3, [0.2, -0.4, 0.7])
    traj = dynamics.dlga_simulate(state, torque, model, 0.1, 128)
    worst = float(np.abs(traj.momentum_residuals(model)).max())
    return worst <= 1e-10, f"max momentum residual {worst:.2e}"


def _check_so2_embedding():
    model = liealg.InertiaModel.from_operator_matrix(np.diag([0.5, 0.5, 0.7]))
    n, h = 500, 10.0 / 500
    planar = dynamics.so2_simulate(3.0, 4.0, 1.0,
                                   lambda t: np.sin(np.pi * t / 2), h, n)
    traj = dynamics.dlga_simulate(
        dynamics.RigidBodyState(liealg.exp_so3([0, 0, 3.0]),
                                np.array([0.0, 0.0, 4.0])),
        dynamics.sine_torque(1.0, np.pi / 2, [0, 0, 1]), model, h, n)
    dw = np.abs(traj.omegas[:, 2] - planar.omegas).max()
    dr = max(np.abs(traj.attitudes[k] - liealg.exp_so3([0, 0, planar.thetas[k]])).max()
             for k in range(n + 1))
    ok = dw <= 1e-12 and dr <= 1e-12
    return ok, f"omega diff {dw:.2e}, attitude diff {dr:.2e}"


def _so2_endpoint_error(n):
    h = 10.0 / n
    planar = dynamics.so2_simulate(3.0, 4.0, 1.0,
                                   lambda t: np.sin(np.pi * t / 2), h, n)
    t_end = h * n
    exact = 3 + 4 * t_end + (2 / np.pi) * t_end - (4 / np.pi**2) * np.sin(np.pi * t_end / 2)
    return abs(planar.thetas[-1] - exact)


def _check_first_order():
    ratio = _so2_endpoint_error(1000) / _so2_endpoint_error(2000)
    return 1.7 <= ratio <= 2.3, f"endpoint error ratio {ratio:.3f}"


def _integrator_order(step):
    hs = [0.1, 0.05, 0.025, 0.0125]
    errs = []
    for h in hs:
        q, p = 1.0, 0.0
        n = round(1.0 / h)
        for _ in range(n):
            q, p = step(q, p, h, lambda x: x, 1.0)
        errs.append(abs(q - np.cos(1.0)) + abs(p + np.sin(1.0)))
    slope = np.polyfit(np.log(hs), np.log(errs), 1)[0]
    return slope


def _check_integrator_orders():
    s_euler = _integrator_order(dynamics.symplectic_euler_step)
    s_verlet = _integrator_order(dynamics.stormer_verlet_step)
    ok = abs(s_euler - 1.0) <= 0.15 and abs(s_verlet - 2.0) <= 0.15
    return ok, f"euler slope {s_euler:.3f}, verlet slope {s_verlet:.3f}"


def _check_energy_bound():
    h, n = 0.01, 100_000
    q, p = 1.0, 0.0
    e0 = 0.5 * (q * q + p * p)
    dev_first = dev_last = 0.0
    for k in range(n):
        q, p = dynamics.symplectic_euler_step(q, p, h, lambda x: x, 1.0)
        dev = abs(0.5 * (q * q + p * p) - e0)
        if k < n // 10:
            dev_first = max(dev_first, dev)
        if k >= n - n // 10:
            dev_last = max(dev_last, dev)
    ok = dev_last <= 2.0 * dev_first and dev_last < 2.0 * h
    return ok, f"energy dev first {dev_first:.2e}, last {dev_last:.2e}"


def _check_dimensions():
    model = liealg.InertiaModel.from_operator_matrix(_REFERENCE_INERTIA)
    for n in (4, 5, 9):
        spec = optctrl.ManeuverSpec(r0=np.eye(3), rN=liealg.exp_so3([0.3, 0, 0]),
                                    omega0=np.zeros(3), omegaNm1=np.zeros(3),
                                    N=n, h=0.1, inertia=model)
        x = optctrl.initial_guess(spec)
        if x.flat().size != optctrl.unknown_dimension(n):
            return False, f"unknown length mismatch at N={n}"
        if optctrl.residual(x, spec).size != optctrl.unknown_dimension(n):
            return False, f"residual length mismatch at N={n}"
    return True, "residual and unknown lengths 3(2N-3) for N in {4, 5, 9}"


def _check_zero_residuals():
    model = liealg.InertiaModel.from_operator_matrix(_REFERENCE_INERTIA)
    spec = optctrl.ManeuverSpec(r0=np.eye(3), rN=np.eye(3),
                                omega0=np.zeros(3), omegaNm1=np.zeros(3),
                                N=6, h=0.1, inertia=model)
    r_id = np.abs(optctrl.residual(optctrl.UnknownVector.zeros(6), spec)).max()
    _, vecs = np.linalg.eigh(model.j_classical)
    omega = 0.3 * vecs[:, 0]
    n, h = 8, 0.1
    spin = optctrl.ManeuverSpec(r0=np.eye(3), rN=liealg.exp_so3(n * h * omega),
                                omega0=omega, omegaNm1=omega,
                                N=n, h=h, inertia=model)
    x = optctrl.UnknownVector(taus=np.zeros((n - 1, 3)),
                              omegas=np.tile(omega, (n - 2, 1)))
    r_spin = np.abs(optctrl.residual(x, spin)).max()
    ok = r_id == 0.0 and r_spin <= 1e-12
    return ok, f"identity {r_id:.1e}, principal-axis spin {r_spin:.2e}"


def _check_equivariance():
    rng = np.random.default_rng(107)
    model = liealg.InertiaModel.from_operator_matrix(_REFERENCE_INERTIA)
    spec = optctrl.ManeuverSpec(r0=np.eye(3), rN=liealg.exp_so3([np.pi / 3, 0, 0]),
                                omega0=np.zeros(3), omegaNm1=np.zeros(3),
                                N=16, h=0.1, inertia=model)
    x = rng.uniform(-0.2, 0.2, optctrl.unknown_dimension(16))
    base = optctrl.residual(x, spec)
    for _ in range(10):
        q = liealg.exp_so3(rng.uniform(-1.0, 1.0, 3))
        rotated = optctrl.equivariance_transform(q, spec)
        if not np.array_equal(base, optctrl.residual(x, rotated)):
            return False, "residual changed under frame rotation"
    return True, "bit-identical residuals under 10 frame rotations"


def _check_jacobian_agreement():
    rng = np.random.default_rng(108)
    model = liealg.InertiaModel.from_operator_matrix(_REFERENCE_INERTIA)
    spec = optctrl.ManeuverSpec(r0=np.eye(3), rN=liealg.exp_so3([0.2, 0, 0]),
                                omega0=np.zeros(3), omegaNm1=np.zeros(3),
                                N=5, h=0.1, inertia=model)
    f = lambda z: optctrl.residual(z, spec)
    worst = 0.0
    for _ in range(3):
        x = rng.uniform(-0.3, 0.3, optctrl.unknown_dimension(5))
        jc = nlsolve.jacobian_complex_step(f, x)
        jf = nlsolve.jacobian_fd(f, x)
        worst = max(worst, np.abs(jc - jf).max() / np.abs(jc).max())
    return worst <= 1e-6, f"worst relative disagreement {worst:.2e}"


def _check_step_insensitivity():
    rng = np.random.default_rng(109)
    model = liealg.InertiaModel.from_operator_matrix(_REFERENCE_INERTIA)
    spec = optctrl.ManeuverSpec(r0=np.eye(3), rN=liealg.exp_so3([0.2, 0, 0]),
                                omega0=np.zeros(3), omegaNm1=np.zeros(3),
                                N=5, h=0.1, inertia=model)
    f = lambda z: optctrl.residual(z, spec)
    x = rng.uniform(-0.3, 0.3, optctrl.unknown_dimension(5))
    jacs = [nlsolve.jacobian_complex_step(f, x, eps=e)
            for e in (1e-50, 1e-100, 1e-150)]
    scale = np.abs(jacs[1]).max()
    worst = max(np.abs(j - jacs[1]).max() / scale for j in jacs)
    return worst <= 1e-12, f"worst relative spread {worst:.2e}"


CHECKS = [
    ("liealg.roundtrips", _check_roundtrips),
    ("liealg.exp_group", _check_exp_group),
    ("liealg.self_adjoint", _check_self_adjoint),
    ("liealg.ad_duality", _check_ad_duality),
    ("dynamics.group_drift", _check_group_drift),
    ("dynamics.momentum_update", _check_momentum_update),
    ("dynamics.so2_embedding", _check_so2_embedding),
    ("dynamics.first_order", _check_first_order),
    ("integrators.orders", _check_integrator_orders),
    ("integrators.energy_bound", _check_energy_bound),
    ("optctrl.dimensions", _check_dimensions),
    ("optctrl.zero_residuals", _check_zero_residuals),
    ("optctrl.equivariance", _check_equivariance),
    ("nlsolve.jacobian_agreement", _check_jacobian_agreement),
    ("nlsolve.step_insensitivity", _check_step_insensitivity),
]


def run_checks(name_filter: str | None = None) -> list[CheckResult]:
    results = []
    for name, fn in CHECKS:
        if name_filter and name_filter not in name:
            continue
        try:
            passed, detail = fn()
        except Exception as err:  # a crashing check is a failing check
            passed, detail = False, f"raised {type(err).__name__}: {err}"
        results.append(CheckResult(name=name, passed=passed, detail=detail))
    return results


def write_log_test_vectors(path) -> None:
    """Deterministic rotation/log pairs for cross-implementation checks.

    Covers the identity, small angles down to 1e-6, and angles up to just
    below the near-pi refusal region.
    """
    rng = np.random.default_rng(20240817)
    angles = [0.0, 1e-6, 1e-4, 1e-2, 0.1, 0.5, 1.0, 1.7, 2.4, 3.0,
              np.pi - 0.05]
    rows = []
    for angle in angles:
        for axis in _rand_units(rng, 4):
            v = angle * axis
            R = liealg.exp_so3(v)
            w = liealg.log_so3(R)
            rows.append(np.concatenate([R.ravel(), w]))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["r11", "r12", "r13", "r21", "r22", "r23",
                         "r31", "r32", "r33", "vx", "vy", "vz"])
        for row in rows:
            writer.writerow(["%.17g" % x for x in row])
