"""Damped Newton root finding with complex-step Jacobians.

The residual functions solved here are pure, deterministic maps from
n-vectors to n-vectors that also accept complex input, so each Jacobian
column is the exactly scaled imaginary part Im[F(x + i eps e_k)] / eps.
A central finite-difference Jacobian is kept alongside as an independent
cross-check.  Linear solves use dense LU with partial pivoting.
"""

from __future__ import annotations

import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

_THREADS_ENV = "LIE_DMOC_THREADS"


class EvaluationRejected(RuntimeError):
    """A residual evaluation declared its input a failed iterate.

    Raised by residual implementations at points they cannot evaluate
    reliably (for example a closure logarithm near angle pi).  The line
    search treats it like a non-decreasing trial and backtracks.
    """


class NewtonError(RuntimeError):
    """Newton iteration failed; carries the best iterate seen."""

    def __init__(self, message: str, best_root, best_residual_norm: float,
                 iterations: int):
        super().__init__(message)
        self.best_root = best_root
        self.best_residual_norm = best_residual_norm
        self.iterations = iterations


class SingularJacobian(NewtonError):
    """An LU pivot fell below 1e-14 times the pivot scale."""


class NoProgress(NewtonError):
    """Backtracking exhausted its halvings without reducing the residual."""


class MaxIterations(NewtonError):
    """Iteration limit reached before the residual tolerance."""


@dataclass
class SolverOptions:
    """Newton solver settings.

    step_eps defaults per Jacobian method: 1e-100 for complex-step (no
    subtractive cancellation, so the step can sit far below sqrt(eps)),
    1e-7 for finite differences.
    """

    tol: float = 1e-9
    max_iter: int = 100
    jacobian: str = "complex-step"  # or "finite-difference"
    step_eps: float | None = None
    max_halvings: int = 30

    def __post_init__(self):
        if self.tol <= 0.0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.jacobian not in ("complex-step", "finite-difference"):
            raise ValueError(f"unknown jacobian method {self.jacobian!r}")

    @property
    def eps(self) -> float:
        if self.step_eps is not None:
            return self.step_eps
        return 1e-100 if self.jacobian == "complex-step" else 1e-7


@dataclass
class SolveReport:
    root: np.ndarray
    residual_norm: float
    iterations: int
    converged: bool
    damping_events: int
    residual_history: list = field(default_factory=list)


def _worker_count(n: int) -> int:
    try:
        workers = int(os.environ.get(_THREADS_ENV, "1"))
    except ValueError:
        workers = 1
    return max(1, min(workers, n))


def jacobian_complex_step(F, x, eps: float = 1e-100) -> np.ndarray:
    """Jacobian of F at x, column k = Im[F(x + i eps e_k)] / eps.

    Exact to machine precision for analytic F.  Columns are independent;
    LIE_DMOC_THREADS > 1 computes them on a thread pool (assembly order is
    fixed by column index, so the result is deterministic either way).
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    base = x.astype(complex)

    def column(k: int) -> np.ndarray:
        xp = base.copy()
        xp[k] += 1j * eps
        return np.imag(F(xp)) / eps

    J = np.empty((n, n))
    workers = _worker_count(n)
    if workers == 1:
        for k in range(n):
            J[:, k] = column(k)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for k, col in enumerate(pool.map(column, range(n))):
                J[:, k] = col
    return J


def jacobian_fd(F, x, step: float = 1e-7) -> np.ndarray:
    """Central finite-difference Jacobian with per-coordinate step
    step * (1 + |x_k|).  Cross-check oracle for the complex-step path."""
    x = np.asarray(x, dtype=float)
    n = x.size
    J = np.empty((n, n))
    for k in range(n):
        e = step * (1.0 + abs(x[k]))
        xp = x.copy()
        xm = x.copy()
        xp[k] += e
        xm[k] -= e
        J[:, k] = (np.asarray(F(xp)) - np.asarray(F(xm))) / (2.0 * e)
    return J


def _inf_norm(v) -> float:
    return float(np.max(np.abs(v)))


def newton_solve(F, x0, options: SolverOptions | None = None) -> SolveReport:
    """Solve F(x) = 0 by damped Newton iteration.

    Each step solves J d = -F(x) by dense LU with partial pivoting, then
    backtracks x + alpha d with alpha halving until the residual infinity
    norm decreases (at most options.max_halvings halvings, then NoProgress).
    Convergence is checked before the first step, so a root as initial
    guess reports zero iterations.  Raises SingularJacobian, NoProgress or
    MaxIterations; all carry the best iterate seen.
    """
    opts = options if options is not None else SolverOptions()
    x = np.array(x0, dtype=float).ravel()
    Fx = np.asarray(F(x), dtype=float)
    if Fx.shape != x.shape:
        raise ValueError(f"residual shape {Fx.shape} does not match unknowns {x.shape}")
    norm = _inf_norm(Fx)
    history = [norm]
    damping_events = 0

    for iteration in range(opts.max_iter + 1):
        if norm <= opts.tol:
            return SolveReport(root=x, residual_norm=norm, iterations=iteration,
                               converged=True, damping_events=damping_events,
                               residual_history=history)
        if iteration == opts.max_iter:
            raise MaxIterations(
                f"no convergence after {opts.max_iter} iterations "
                f"(residual {norm:.3e})", x, norm, iteration)

        if opts.jacobian == "complex-step":
            J = jacobian_complex_step(F, x, eps=opts.eps)
        else:
            J = jacobian_fd(F, x, step=opts.eps)
        with warnings.catch_warnings():
            # singularity is detected below via the pivot scale
            warnings.simplefilter("ignore", LinAlgWarning)
            lu, piv = lu_factor(J, check_finite=False)
        diag = np.abs(np.diag(lu))
        scale = diag.max() if diag.size else 0.0
        if scale == 0.0 or diag.min() < 1e-14 * scale:
            raise SingularJacobian(
                f"LU pivot below 1e-14 of scale at iteration {iteration}",
                x, norm, iteration)
        delta = lu_solve((lu, piv), -Fx, check_finite=False)

        alpha = 1.0
        accepted = False
        for _ in range(opts.max_halvings + 1):
            trial = x + alpha * delta
            try:
                Ft = np.asarray(F(trial), dtype=float)
            except EvaluationRejected:
                Ft = None
            if Ft is not None:
                trial_norm = _inf_norm(Ft)
                if trial_norm < norm:
                    accepted = True
                    break
            alpha *= 0.5
            damping_events += 1
        if not accepted:
            raise NoProgress(
                f"line search stalled at iteration {iteration} "
                f"(residual {norm:.3e})", x, norm, iteration)

        x, Fx, norm = trial, Ft, trial_norm
        history.append(norm)

    raise AssertionError("unreachable")
