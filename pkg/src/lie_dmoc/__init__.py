"""Structure-preserving rigid-body attitude dynamics on SO(3) and the
minimum-torque maneuver two point boundary value solver."""

from .dynamics import (ContinuousTrajectory, DiscreteTrajectory,
                       RigidBodyState, So2Trajectory, StepSolveFailed,
                       continuous_rhs, dlga_simulate, dlga_step,
                       rk4_integrate, sine_torque, so2_simulate,
                       stormer_verlet_step, symplectic_euler_step,
                       zero_torque)
from .liealg import (AngleNearPi, InertiaModel, NotPositiveDefinite, ad_star,
                     adjoint, coadjoint, curvature, exp_so3, hat,
                     inertia_apply, inertia_solve, log_so3,
                     orthogonality_error, pairing_norm_sq, require_rotation,
                     vee)
from .nlsolve import (EvaluationRejected, MaxIterations, NewtonError,
                      NoProgress, SingularJacobian, SolveReport,
                      SolverOptions, jacobian_complex_step, jacobian_fd,
                      newton_solve)
from .optctrl import (ClosureIllConditioned, ManeuverSpec, MultiplierReport,
                      NoConvergence, OptimalSolution, UnknownVector, cost,
                      equivariance_transform, initial_guess,
                      multiplier_check, reconstruct, residual, solve,
                      unknown_dimension)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
