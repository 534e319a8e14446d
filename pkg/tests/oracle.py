"""Brute-force reference minimizer for small maneuvers.

Independent route to the optimum: decision variables are the torques
alone, the velocities are propagated by the one-step implicit update, and
the terminal velocity plus attitude closure are enforced by a penalty
that is re-centered on multiplier estimates between rounds (method of
multipliers).  The inner minimizations use BFGS on central-difference
gradients.  Nothing here touches the stationarity equations the solver
under test is built on.
"""

import numpy as np
from scipy.optimize import minimize

from lie_dmoc import dlga_step, exp_so3, log_so3


def _constraints(flat_taus, spec):
    taus = flat_taus.reshape(spec.N - 1, 3)
    om = np.array(spec.omega0, dtype=float)
    oms = [om]
    for k in range(1, spec.N):
        om = dlga_step(oms[-1], taus[k - 1], spec.inertia, spec.h, tol=1e-13)
        oms.append(om)
    attitude = spec.r0.copy()
    for om_k in oms:
        attitude = attitude @ exp_so3(spec.h * om_k)
    return np.concatenate([oms[spec.N - 1] - spec.omegaNm1,
                           log_so3(attitude.T @ spec.rN)])


def _central_grad(f, x, step=3e-6):
    g = np.empty_like(x)
    for i in range(x.size):
        xp = x.copy()
        xm = x.copy()
        xp[i] += step
        xm[i] -= step
        g[i] = (f(xp) - f(xm)) / (2.0 * step)
    return g


def penalty_minimize(spec, rounds=8, mu0=1e3, mu_max=1e6):
    """Returns (taus (N-1, 3), cost, max constraint violation)."""
    lam = np.zeros(6)
    mu = mu0
    x = np.zeros(3 * (spec.N - 1))
    c = _constraints(x, spec)
    for _ in range(rounds):
        def penalized(flat):
            cv = _constraints(flat, spec)
            return 0.5 * np.sum(flat ** 2) + lam @ cv + mu * np.sum(cv ** 2)

        res = minimize(penalized, x, jac=lambda z: _central_grad(penalized, z),
                       method="BFGS", options={"maxiter": 3000, "gtol": 1e-9})
        x = res.x
        c = _constraints(x, spec)
        lam = lam + 2.0 * mu * c
        if np.abs(c).max() < 1e-11:
            break
        mu = min(mu * 10.0, mu_max)
    taus = x.reshape(spec.N - 1, 3)
    return taus, 0.5 * float(np.sum(taus ** 2)), float(np.abs(c).max())
