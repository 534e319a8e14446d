"""SO(3)/so(3) primitives: hat/vee, exponential and logarithm maps,
adjoint actions, pairings, and the rigid-body inertia operator.

Everything here is a pure function of its inputs and works on float64 or
complex128 data.  Complex support is deliberate: the maneuver residual is
differentiated by complex-step perturbation, so every operation must stay
analytic under a tiny imaginary offset.  Branch decisions are therefore
taken on real parts only, norms are formed from unconjugated dot products,
and matrix transposes never conjugate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# exp switches to series coefficients below this squared angle
_EXP_SERIES_T = 1e-16
# log switches to its series form below this angle
_LOG_SERIES_THETA = 1e-8
# log refuses rotations this close to pi (axis ill-conditioned)
_LOG_PI_MARGIN = 1e-6


class AngleNearPi(ValueError):
    """Rotation angle is within 1e-6 of pi, where the log axis is ill-conditioned."""


class NotPositiveDefinite(ValueError):
    """Inertia matrix is not symmetric positive definite."""


def hat(v):
    """Map a 3-vector to the skew-symmetric matrix satisfying hat(u) @ w = u x w.

    Accepts batched input of shape (..., 3), returning (..., 3, 3).
    """
    v = np.asarray(v)
    dtype = np.result_type(v.dtype, np.float64)
    out = np.zeros(v.shape[:-1] + (3, 3), dtype=dtype)
    out[..., 0, 1] = -v[..., 2]
    out[..., 0, 2] = v[..., 1]
    out[..., 1, 0] = v[..., 2]
    out[..., 1, 2] = -v[..., 0]
    out[..., 2, 0] = -v[..., 1]
    out[..., 2, 1] = v[..., 0]
    return out


def vee(S):
    """Inverse of hat.  The symmetric part of S is discarded: the result is
    the vector of the antisymmetric part (S - S^T)/2."""
    S = np.asarray(S)
    A = (S - np.swapaxes(S, -1, -2)) / 2.0
    return np.stack([A[..., 2, 1], A[..., 0, 2], A[..., 1, 0]], axis=-1)


def exp_so3(v):
    """Exponential map so(3) -> SO(3) by the Rodrigues formula.

    R = I + sin(t)/t * hat(v) + (1 - cos(t))/t^2 * hat(v)^2 with t = |v|.
    Below t^2 = 1e-16 both coefficients come from their 4th-order Taylor
    series in t^2, which keeps the map analytic through v = 0 (required for
    complex-step differentiation).  Accepts batched input (..., 3).
    """
    v = np.asarray(v)
    dtype = np.result_type(v.dtype, np.float64)
    v = v.astype(dtype, copy=False)
    t = np.sum(v * v, axis=-1)
    small = np.real(t) < _EXP_SERIES_T
    t_safe = np.where(small, np.ones_like(t), t)
    th = np.sqrt(t_safe)
    # 1 - cos(th) is formed as 2 sin^2(th/2) to avoid cancellation
    a = np.where(small, 1.0 - t / 6.0 + t * t / 120.0, np.sin(th) / th)
    b = np.where(small, 0.5 - t / 24.0 + t * t / 720.0,
                 2.0 * np.sin(th / 2.0) ** 2 / t_safe)
    K = hat(v)
    eye = np.zeros(K.shape, dtype=dtype)
    eye[..., 0, 0] = eye[..., 1, 1] = eye[..., 2, 2] = 1.0
    return eye + a[..., None, None] * K + b[..., None, None] * (K @ K)


def log_so3(R):
    """Logarithm map SO(3) -> so(3), returned as a 3-vector.

    The rotation angle is acos((tr R - 1)/2).  Angles above pi - 1e-6 raise
    AngleNearPi instead of returning a poorly determined axis.  Below 1e-8
    the series v = vee(R - R^T)/2 * (1 + s^2/6 + 7 s^4/360) is used.  For
    real input the angle is evaluated as atan2(|vee|, cos) which is accurate
    down to the series threshold; complex input follows the arccos form,
    which is the analytic continuation needed by complex-step derivatives.
    """
    R = np.asarray(R)
    tr = R[0, 0] + R[1, 1] + R[2, 2]
    z = (tr - 1.0) / 2.0
    zr = min(1.0, max(-1.0, float(np.real(z))))
    theta_re = np.arccos(zr)
    if theta_re > np.pi - _LOG_PI_MARGIN:
        raise AngleNearPi(f"rotation angle {theta_re!r} is within 1e-6 of pi")
    w = vee(R)
    s2 = w @ w
    if theta_re < _LOG_SERIES_THETA:
        return w * (1.0 + s2 / 6.0 + 7.0 / 360.0 * s2 * s2)
    if np.iscomplexobj(R):
        theta = np.arccos(z)
        return w * (theta / np.sin(theta))
    s = np.sqrt(s2)
    theta = np.arctan2(s, z)
    return w * (theta / s)


def adjoint(R, v):
    """Adjoint action of a rotation on the algebra: Ad_R v = R v."""
    return R @ np.asarray(v)


def coadjoint(R, p):
    """Coadjoint action on the dual: Ad*_R p = R^T p, so that
    coadjoint(R, p) . v == p . adjoint(R, v)."""
    return R.T @ np.asarray(p)


def ad_star(u, p):
    """Infinitesimal coadjoint action ad*_u p = p x u."""
    return np.cross(p, u)


def pairing_norm_sq(p):
    """Squared norm of an algebra (or dual) vector under the standard
    pairing; equals p . p and 1/2 Tr(hat(p)^T hat(p))."""
    p = np.asarray(p)
    return p @ p


def curvature(x, y, z):
    """Curvature tensor of the bi-invariant metric on SO(3) in vector form:
    R(x, y) z = ((x x y) x z) / 4."""
    return 0.25 * np.cross(np.cross(x, y), z)


@dataclass(frozen=True, eq=False)
class InertiaModel:
    """Rigid-body inertia data.

    j_op is the symmetric positive-definite matrix J acting on the algebra
    through X -> J X + X J; j_classical = tr(J) I - J is the equivalent
    classical tensor on vectors, and j_classical_inv its inverse.
    """

    j_op: np.ndarray
    j_classical: np.ndarray
    j_classical_inv: np.ndarray

    @classmethod
    def from_operator_matrix(cls, j) -> "InertiaModel":
        j = np.array(j, dtype=float)
        if j.shape != (3, 3):
            raise NotPositiveDefinite(f"inertia matrix must be 3x3, got {j.shape}")
        if not np.allclose(j, j.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(j).max())):
            raise NotPositiveDefinite("inertia matrix is not symmetric")
        j = (j + j.T) / 2.0  # make symmetry exact
        eigs = np.linalg.eigvalsh(j)
        if eigs.min() <= 0.0:
            raise NotPositiveDefinite(f"inertia eigenvalues must be positive, got {eigs}")
        jc = np.trace(j) * np.eye(3) - j
        return cls(j_op=j, j_classical=jc, j_classical_inv=np.linalg.inv(jc))


def inertia_apply(model: InertiaModel, v):
    """Momentum from body angular velocity: j_classical @ v."""
    return np.asarray(v) @ model.j_classical


def inertia_solve(model: InertiaModel, p):
    """Body angular velocity from momentum: j_classical^-1 @ p."""
    return np.asarray(p) @ model.j_classical_inv


def orthogonality_error(R) -> float:
    """Frobenius norm of R^T R - I."""
    R = np.asarray(R)
    return float(np.linalg.norm(R.T @ R - np.eye(3)))


def require_rotation(R, tol: float = 1e-8) -> np.ndarray:
    """Validate that R is a rotation matrix within tol; returns it as float64."""
    R = np.array(R, dtype=float)
    if R.shape != (3, 3):
        raise ValueError(f"rotation must be 3x3, got shape {R.shape}")
    err = orthogonality_error(R)
    if err > tol:
        raise ValueError(f"matrix is not orthogonal: |R^T R - I| = {err:.3e}")
    det = np.linalg.det(R)
    if abs(det - 1.0) > tol:
        raise ValueError(f"matrix determinant {det!r} is not +1")
    return R
