"""Minimum-torque attitude maneuver solver.

The two point boundary value problem fixes (R_0, W_0) and (R_N, W_{N-1})
and minimizes half the summed squared torque over the discrete forced
rigid-body dynamics.  Eliminating the multipliers leaves the torques
tau_1..tau_{N-1} and interior velocities W_1..W_{N-2} as unknowns, a flat
vector of dimension 3(2N-3), matched exactly by the residual blocks:

  (a) N-3 stationarity vectors, k = 2..N-2:
        [ Jc t_k - g_k Jc t_{k+1} - Jc g_{k-1}^T t_{k-1}
          + g_k Jc g_k^T t_k ]
        + h [ g_k (M_k x g_k^T t_k) - M_{k-1} x g_{k-1}^T t_{k-1} ]
      (the raw stationarity equations carry 1/h^2 and 1/h prefactors;
      they are normalized by -h^2 here so every block sits at a
      comparable scale, which the infinity-norm line search needs.  The
      root set is identical.)
  (b) N-1 momentum-evolution vectors, k = 1..N-1:
        Jc W_k - g_k^T (h t_k + Jc W_{k-1})
  (c) one closure vector:
        log( R_N^T R_0 exp(h W_0) ... exp(h W_{N-1}) )

with g_k = exp(h W_k), Jc the classical inertia tensor, M_k = Jc W_k, and
the boundary values W_0, W_{N-1} substituted wherever they appear.  The
endpoint attitudes enter only through the relative rotation R_N^T R_0,
which makes the whole system equivariant under a common frame rotation of
the boundary attitudes; ManeuverSpec caches that relative rotation so the
equivariance holds bit for bit.

The residual is evaluable over complex input and is solved by damped
Newton with complex-step Jacobians.  A converged root is cross-checked
against the multiplier form of the optimality conditions.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .dynamics import DiscreteTrajectory
from .liealg import (AngleNearPi, InertiaModel, exp_so3, log_so3,
                     require_rotation)
from .nlsolve import (EvaluationRejected, NewtonError, SolveReport,
                      SolverOptions, newton_solve)

_CONTINUATION_STAGES = (0.25, 0.5, 0.75, 1.0)


class ClosureIllConditioned(EvaluationRejected):
    """The closure rotation angle came within 1e-6 of pi at an iterate."""


class NoConvergence(RuntimeError):
    """The maneuver solve failed, including any continuation fallback."""

    def __init__(self, best_residual: float, iterations: int):
        super().__init__(
            f"maneuver solve did not converge: best residual "
            f"{best_residual:.3e} after {iterations} iterations")
        self.best_residual = best_residual
        self.iterations = iterations


def unknown_dimension(n_steps: int) -> int:
    """Flat unknown (and residual) length, 3(2N-3)."""
    return 3 * (2 * n_steps - 3)


@dataclass
class ManeuverSpec:
    """Boundary data for the maneuver.

    rel is the relative rotation rN^T r0, the only way the endpoint
    attitudes enter the optimality system.  It is computed once here and
    carried verbatim through frame transforms, so a rotated problem
    evaluates bit-identically to the original.
    """

    r0: np.ndarray
    rN: np.ndarray
    omega0: np.ndarray
    omegaNm1: np.ndarray
    N: int
    h: float
    inertia: InertiaModel
    rel: np.ndarray | None = None

    def __post_init__(self):
        if self.N < 4:
            raise ValueError(f"N must be at least 4, got {self.N}")
        if self.h <= 0.0:
            raise ValueError("h must be positive")
        self.r0 = require_rotation(self.r0)
        self.rN = require_rotation(self.rN)
        self.omega0 = np.array(self.omega0, dtype=float).reshape(3)
        self.omegaNm1 = np.array(self.omegaNm1, dtype=float).reshape(3)
        if self.rel is None:
            self.rel = self.rN.T @ self.r0


@dataclass
class UnknownVector:
    """Packed unknowns: taus holds tau_1..tau_{N-1}, omegas W_1..W_{N-2}."""

    taus: np.ndarray    # (N-1, 3)
    omegas: np.ndarray  # (N-2, 3)

    @property
    def n_steps(self) -> int:
        return self.taus.shape[0] + 1

    def flat(self) -> np.ndarray:
        return np.concatenate([self.taus.ravel(), self.omegas.ravel()])

    @classmethod
    def from_flat(cls, flat, n_steps: int) -> "UnknownVector":
        flat = np.asarray(flat)
        expected = unknown_dimension(n_steps)
        if flat.size != expected:
            raise ValueError(f"flat length {flat.size} != {expected} for N={n_steps}")
        split = 3 * (n_steps - 1)
        return cls(taus=flat[:split].reshape(n_steps - 1, 3),
                   omegas=flat[split:].reshape(n_steps - 2, 3))

    @classmethod
    def zeros(cls, n_steps: int) -> "UnknownVector":
        return cls(taus=np.zeros((n_steps - 1, 3)),
                   omegas=np.zeros((n_steps - 2, 3)))


@dataclass
class OptimalSolution:
    trajectory: DiscreteTrajectory
    cost: float
    residual_norm: float
    iterations: int


@dataclass
class MultiplierReport:
    """Multipliers recovered from a root, and how well they satisfy the
    multiplier transport equation."""

    lambda1s: np.ndarray  # (N-2, 3), k = 1..N-2
    lambda2s: np.ndarray  # (N-1, 3), k = 1..N-1
    max_consistency_residual: float


def _apply(gs, vs):
    """Batched rotation action g_k v_k."""
    return np.einsum("kij,kj->ki", gs, vs)


def _apply_t(gs, vs):
    """Batched inverse action g_k^T v_k (plain transpose, no conjugation)."""
    return np.einsum("kji,kj->ki", gs, vs)


def _as_unknowns(x, n_steps: int) -> UnknownVector:
    if isinstance(x, UnknownVector):
        return x
    return UnknownVector.from_flat(x, n_steps)


def _full_omegas(ux: UnknownVector, spec: ManeuverSpec, dtype) -> np.ndarray:
    """Velocities W_0..W_{N-1} with the boundary values substituted."""
    om = np.empty((spec.N, 3), dtype=dtype)
    om[0] = spec.omega0
    om[1:spec.N - 1] = ux.omegas
    om[spec.N - 1] = spec.omegaNm1
    return om


def residual(x, spec: ManeuverSpec) -> np.ndarray:
    """Flat optimality residual of length 3(2N-3).

    Block order is fixed: stationarity (k=2..N-2), momentum evolution
    (k=1..N-1), closure.  Pure and deterministic; accepts float or complex
    input so complex-step columns are exact.
    """
    ux = _as_unknowns(x, spec.N)
    n, h = spec.N, spec.h
    jc = spec.inertia.j_classical
    dtype = np.result_type(ux.taus.dtype, ux.omegas.dtype, np.float64)
    taus = ux.taus.astype(dtype, copy=False)

    om = _full_omegas(ux, spec, dtype)
    g = exp_so3(h * om)          # g_k = exp(h W_k), k = 0..N-1
    m = om @ jc                  # momenta M_k = Jc W_k

    # (a) stationarity, k = 2..N-2; taus[i] is tau_{i+1}
    t_km1 = taus[0:n - 3]
    t_k = taus[1:n - 2]
    t_kp1 = taus[2:n - 1]
    g_km1 = g[1:n - 2]
    g_k = g[2:n - 1]
    m_km1 = m[1:n - 2]
    m_k = m[2:n - 1]
    gt_km1 = _apply_t(g_km1, t_km1)   # g_{k-1}^T tau_{k-1}
    gt_k = _apply_t(g_k, t_k)         # g_k^T tau_k
    quad = (t_k @ jc
            - _apply(g_k, t_kp1 @ jc)
            - gt_km1 @ jc
            + _apply(g_k, gt_k @ jc))
    brackets = _apply(g_k, np.cross(m_k, gt_k)) - np.cross(m_km1, gt_km1)
    res_sta = quad + h * brackets

    # (b) momentum evolution, k = 1..N-1
    res_mom = m[1:] - _apply_t(g[1:], h * taus + m[:-1])

    # (c) closure
    prod = spec.rel.astype(dtype)
    for k in range(n):
        prod = prod @ g[k]
    try:
        res_clo = log_so3(prod)
    except AngleNearPi as err:
        raise ClosureIllConditioned(str(err)) from err

    return np.concatenate([res_sta.ravel(), res_mom.ravel(), res_clo])


def cost(x: UnknownVector) -> float:
    """Half the summed squared torque over tau_1..tau_{N-1} (the endpoint
    torques are zero by construction and contribute nothing)."""
    return 0.5 * float(np.sum(x.taus ** 2))


def initial_guess(spec: ManeuverSpec) -> UnknownVector:
    """Deterministic starting point: zero torques and velocities ramping
    linearly in k through W_0*, xi, W_{N-1}*, where xi is the geodesic rate
    log(r0^T rN) / (N h)."""
    phi = log_so3(spec.rel.T)    # log(r0^T rN), from the cached relative rotation
    angle = float(np.linalg.norm(phi))
    if angle > np.pi - 1e-3:
        raise AngleNearPi(f"maneuver rotation angle {angle!r} too close to pi")
    xi = phi / (spec.N * spec.h)
    mid = (spec.N - 1) / 2.0
    ks = np.arange(1, spec.N - 1, dtype=float)
    omegas = np.empty((spec.N - 2, 3))
    for c in range(3):
        omegas[:, c] = np.interp(ks, [0.0, mid, float(spec.N - 1)],
                                 [spec.omega0[c], xi[c], spec.omegaNm1[c]])
    return UnknownVector(taus=np.zeros((spec.N - 1, 3)), omegas=omegas)


def reconstruct(x, spec: ManeuverSpec) -> DiscreteTrajectory:
    """Trajectory implied by an unknown vector: attitudes accumulate from
    r0 through exp(h W_k) and the endpoint torques are exactly zero.

    The endpoint attitude defect |log(R_N^T rN)| is checked against the
    closure block of the residual; they are the same quantity computed two
    ways and a gross mismatch indicates a bug, not bad data.
    """
    ux = _as_unknowns(x, spec.N)
    n, h = spec.N, spec.h
    om = _full_omegas(ux, spec, np.float64)
    g = exp_so3(h * om)
    attitudes = np.empty((n + 1, 3, 3))
    attitudes[0] = spec.r0
    for k in range(n):
        attitudes[k + 1] = attitudes[k] @ g[k]
    torques = np.zeros((n + 1, 3))
    torques[1:n] = ux.taus
    traj = DiscreteTrajectory(h=h, attitudes=attitudes, omegas=om,
                              torques=torques)

    try:
        endpoint = np.linalg.norm(log_so3(attitudes[n].T @ spec.rN))
        closure = np.linalg.norm(residual(ux, spec)[-3:])
    except (AngleNearPi, ClosureIllConditioned):
        return traj
    if abs(endpoint - closure) > 1e-8 * (1.0 + closure):
        raise RuntimeError(
            f"endpoint defect {endpoint!r} disagrees with closure residual "
            f"{closure!r}")
    return traj


def _scaled_spec(spec: ManeuverSpec, lam: float, phi: np.ndarray) -> ManeuverSpec:
    """Spec with the relative rotation scaled to exp(lam * phi).  Both the
    endpoint attitude and the cached relative rotation derive from phi so
    continuation stays frame-transform deterministic."""
    if lam == 1.0:
        return spec
    return ManeuverSpec(r0=spec.r0, rN=spec.r0 @ exp_so3(lam * phi),
                        omega0=spec.omega0, omegaNm1=spec.omegaNm1,
                        N=spec.N, h=spec.h, inertia=spec.inertia,
                        rel=exp_so3(-lam * phi))


def solve(spec: ManeuverSpec, options: SolverOptions | None = None,
          continuation: bool = True) -> OptimalSolution:
    """Newton solve of the optimality system from the geodesic initial
    guess.  If the direct solve fails and continuation is enabled, the
    maneuver rotation is grown through quarters of the full angle with
    warm starts.  Raises NoConvergence when everything fails."""
    opts = options if options is not None else SolverOptions()

    def run(sp: ManeuverSpec, x0: np.ndarray) -> SolveReport:
        return newton_solve(lambda flat: residual(flat, sp), x0, opts)

    report = None
    total_iterations = 0
    try:
        report = run(spec, initial_guess(spec).flat())
        total_iterations = report.iterations
    except (NewtonError, EvaluationRejected) as direct_err:
        if not continuation:
            if isinstance(direct_err, NewtonError):
                raise NoConvergence(direct_err.best_residual_norm,
                                    direct_err.iterations) from direct_err
            raise NoConvergence(float("inf"), 0) from direct_err
        phi = log_so3(spec.rel.T)
        x = None
        lam_prev = None
        for lam in _CONTINUATION_STAGES:
            stage = _scaled_spec(spec, lam, phi)
            if x is None:
                x = initial_guess(stage).flat()
            else:
                # warm start from the previous stage's root, scaled by the
                # growth of the maneuver angle; reusing it unscaled leaves
                # the torque field far from the next stage's root
                x = (lam / lam_prev) * x
            try:
                report = run(stage, x)
            except (NewtonError, EvaluationRejected) as err:
                if isinstance(err, NewtonError):
                    raise NoConvergence(err.best_residual_norm,
                                        total_iterations + err.iterations) from err
                raise NoConvergence(float("inf"), total_iterations) from err
            x = report.root
            lam_prev = lam
            total_iterations += report.iterations

    ux = UnknownVector.from_flat(report.root, spec.N)
    return OptimalSolution(trajectory=reconstruct(ux, spec),
                           cost=cost(ux),
                           residual_norm=report.residual_norm,
                           iterations=total_iterations)


def multiplier_check(sol: OptimalSolution, spec: ManeuverSpec) -> MultiplierReport:
    """Recover the multiplier sequences from a converged solution and
    report how well they satisfy the multiplier transport equation.

    lambda2_k = (1/h) g_k^T tau_k for k = 1..N-1, lambda1_k follows from
    the stationarity recursion for k = 1..N-2, and the report carries
    max over k = 2..N-2 of |lambda1_{k-1} - g_k lambda1_k|.
    """
    n, h = spec.N, spec.h
    jc = spec.inertia.j_classical
    om = sol.trajectory.omegas
    taus = sol.trajectory.torques
    g = exp_so3(h * om)
    m = om @ jc
    lam2 = _apply_t(g[1:n], taus[1:n]) / h
    lam1 = (lam2[0:n - 2] @ jc
            - _apply(g[2:n], lam2[1:n - 1]) @ jc
            + h * np.cross(m[1:n - 1], lam2[0:n - 2]))
    mismatch = lam1[0:n - 3] - _apply(g[2:n - 1], lam1[1:n - 2])
    max_residual = float(np.max(np.linalg.norm(mismatch, axis=1))) \
        if mismatch.size else 0.0
    return MultiplierReport(lambda1s=lam1, lambda2s=lam2,
                            max_consistency_residual=max_residual)


def equivariance_transform(Q, spec: ManeuverSpec) -> ManeuverSpec:
    """Rotate both boundary attitudes by a fixed Q.  Body-frame data is
    untouched and the cached relative rotation is carried over verbatim,
    so the residual of the transformed spec is bit-identical."""
    Q = require_rotation(Q)
    return replace(spec, r0=Q @ spec.r0, rN=Q @ spec.rN, rel=spec.rel)
