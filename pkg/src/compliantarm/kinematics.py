"""Frame arithmetic for the serial chain.

Euler convention used throughout the package: fixed-axis roll-pitch-yaw,
R = Rz(yaw) @ Ry(pitch) @ Rx(roll), components reported as [roll, pitch, yaw]
each wrapped to (-pi, pi]. With the bundled 7-DOF model this makes
[pi, 0, pi] the tool-pointing-down pose.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import ConfigError, SingularityError

# Damped-least-squares pseudoinverse defaults: damping only switches on close
# to a singularity so regular operation stays an exact Moore-Penrose inverse.
PINV_DAMPING = 0.01
PINV_SIGMA_THRESHOLD = 0.05


@dataclass
class RobotModel:
    """Kinematic, inertial and friction description of an n-DOF revolute arm.

    dh is (n, 4) with columns [a, alpha, d, theta_offset] (standard DH).
    Inertias are 3x3 tensors about the link COM, in the link frame.
    """

    name: str
    dh: np.ndarray
    masses: np.ndarray
    coms: np.ndarray
    inertias: np.ndarray
    viscous: np.ndarray
    coulomb: np.ndarray
    joint_limits: np.ndarray
    tau_limits: np.ndarray
    gravity: np.ndarray
    v_eps: float = 0.01

    def __post_init__(self):
        self.dh = np.ascontiguousarray(self.dh, dtype=float)
        self.masses = np.ascontiguousarray(self.masses, dtype=float)
        self.coms = np.ascontiguousarray(self.coms, dtype=float)
        self.inertias = np.ascontiguousarray(self.inertias, dtype=float)
        self.viscous = np.ascontiguousarray(self.viscous, dtype=float)
        self.coulomb = np.ascontiguousarray(self.coulomb, dtype=float)
        self.joint_limits = np.ascontiguousarray(self.joint_limits, dtype=float)
        self.tau_limits = np.ascontiguousarray(self.tau_limits, dtype=float)
        self.gravity = np.ascontiguousarray(self.gravity, dtype=float)

    @property
    def n(self) -> int:
        return self.dh.shape[0]

    def validate(self):
        """Raise ConfigError on any violated model invariant."""
        n = self.n
        if n < 1:
            raise ConfigError("model must have at least one joint")
        shapes = {
            "dh": (self.dh, (n, 4)),
            "masses": (self.masses, (n,)),
            "coms": (self.coms, (n, 3)),
            "inertias": (self.inertias, (n, 3, 3)),
            "viscous": (self.viscous, (n,)),
            "coulomb": (self.coulomb, (n,)),
            "joint_limits": (self.joint_limits, (n, 2)),
            "tau_limits": (self.tau_limits, (n,)),
            "gravity": (self.gravity, (3,)),
        }
        for key, (arr, want) in shapes.items():
            if arr.shape != want:
                raise ConfigError(f"model field {key}: shape {arr.shape}, expected {want}")
        if not np.all(self.masses > 0):
            raise ConfigError("link masses must all be > 0")
        if np.any(self.viscous < 0) or np.any(self.coulomb < 0):
            raise ConfigError("friction coefficients must be >= 0")
        if self.v_eps <= 0:
            raise ConfigError("v_eps must be > 0")
        if not np.all(self.joint_limits[:, 0] < self.joint_limits[:, 1]):
            raise ConfigError("joint limits must satisfy min < max")
        if not np.all(self.tau_limits > 0):
            raise ConfigError("torque limits must be > 0")
        for i, I in enumerate(self.inertias):
            if not np.allclose(I, I.T, atol=1e-12):
                raise ConfigError(f"link {i + 1} inertia is not symmetric")
            if np.min(np.linalg.eigvalsh(I)) <= 0:
                raise ConfigError(f"link {i + 1} inertia is not positive definite")

    def check_q(self, q, warn_limits=True):
        q = np.asarray(q, dtype=float)
        if q.shape != (self.n,):
            raise ValueError(f"expected q of shape ({self.n},), got {q.shape}")
        if warn_limits and (
            np.any(q < self.joint_limits[:, 0]) or np.any(q > self.joint_limits[:, 1])
        ):
            warnings.warn("joint configuration outside model joint limits", stacklevel=3)
        return q


@dataclass
class Pose:
    """EE position (m) and fixed-axis RPY orientation (rad), base frame."""

    p: np.ndarray
    r: np.ndarray


@dataclass
class JacobianSet:
    """EE Jacobian with its pseudoinverse and null-space projector."""

    J: np.ndarray
    J_pinv: np.ndarray
    N: np.ndarray
    sigma_min: float = field(default=np.nan)


def wrap_angle(x):
    """Wrap angles into (-pi, pi]."""
    x = np.asarray(x, dtype=float)
    y = np.mod(x + np.pi, 2.0 * np.pi) - np.pi
    return np.where(y == -np.pi, np.pi, y)


def rpy_from_matrix(R):
    """Extract [roll, pitch, yaw] with R = Rz(yaw) Ry(pitch) Rx(roll)."""
    sy = np.hypot(R[2, 1], R[2, 2])
    pitch = np.arctan2(-R[2, 0], sy)
    if sy < 1e-12:  # gimbal lock: roll/yaw ambiguous, fold into yaw
        roll = 0.0
        yaw = np.arctan2(-R[0, 1], R[1, 1])
    else:
        roll = np.arctan2(R[2, 1], R[2, 2])
        yaw = np.arctan2(R[1, 0], R[0, 0])
    return wrap_angle(np.array([roll, pitch, yaw]))


def frames(model: RobotModel, q) -> np.ndarray:
    """All base->frame transforms, (n+1, 4, 4); frame 0 is the base."""
    q = model.check_q(q)
    return _kernels.fk_frames(model.dh, q)


def forward_kinematics(model: RobotModel, q):
    """EE pose plus per-joint frame origins (rows of an (n+1, 3) array)."""
    T = frames(model, q)
    pose = Pose(p=T[-1, :3, 3].copy(), r=rpy_from_matrix(T[-1, :3, :3]))
    return pose, T[:, :3, 3].copy()


def jacobian(model: RobotModel, q) -> np.ndarray:
    """Geometric EE Jacobian (6 x n), translational rows first, base frame."""
    q = model.check_q(q, warn_limits=False)
    return _kernels.point_jacobian(_kernels.fk_frames(model.dh, q), model.n, np.zeros(3))


def contact_jacobian(model: RobotModel, q, link_index: int, offset) -> np.ndarray:
    """Jacobian of a point fixed in link `link_index` (1-based) at `offset` (link frame)."""
    if not 1 <= link_index <= model.n:
        raise ValueError(f"link_index {link_index} out of range 1..{model.n}")
    q = model.check_q(q, warn_limits=False)
    offset = np.asarray(offset, dtype=float)
    if offset.shape != (3,):
        raise ValueError("offset must be a 3-vector")
    return _kernels.point_jacobian(_kernels.fk_frames(model.dh, q), link_index, offset)


def pseudoinverse(J, damping: float = 0.0) -> np.ndarray:
    """Damped pseudoinverse J^T (J J^T + damping^2 I)^-1 via SVD.

    With damping = 0 this is the exact Moore-Penrose inverse and raises
    SingularityError when J is numerically row-rank-deficient.
    """
    J = np.asarray(J, dtype=float)
    if damping < 0:
        raise ValueError("damping must be >= 0")
    U, s, Vt = np.linalg.svd(J, full_matrices=False)
    if damping == 0.0:
        if s[-1] < 1e-10 * max(1.0, s[0]):
            raise SingularityError(s[-1])
        inv_s = 1.0 / s
    else:
        inv_s = s / (s * s + damping * damping)
    return (Vt.T * inv_s) @ U.T


def null_projector(J, J_pinv) -> np.ndarray:
    """N = I - J_pinv J, the null-space projector of J."""
    J = np.asarray(J, dtype=float)
    J_pinv = np.asarray(J_pinv, dtype=float)
    if J.shape[0] != J_pinv.shape[1] or J.shape[1] != J_pinv.shape[0]:
        raise ValueError("inconsistent J / J_pinv dimensions")
    return np.eye(J.shape[1]) - J_pinv @ J


def jacobian_set(
    model: RobotModel,
    q,
    damping: float = PINV_DAMPING,
    sigma_threshold: float = PINV_SIGMA_THRESHOLD,
) -> JacobianSet:
    """Jacobian, conditionally-damped pseudoinverse and projector in one pass.

    Damping switches on only when the smallest singular value drops below
    sigma_threshold; away from singularities the inverse is exact.
    """
    J = jacobian(model, q)
    sigma_min = np.linalg.svd(J, compute_uv=False)[-1]
    lam = damping if sigma_min < sigma_threshold else 0.0
    J_pinv = pseudoinverse(J, lam)
    return JacobianSet(J=J, J_pinv=J_pinv, N=null_projector(J, J_pinv), sigma_min=float(sigma_min))


def euler_error(r_d, r) -> np.ndarray:
    """Componentwise orientation error wrapped to the smallest signed angle."""
    r_d = np.asarray(r_d, dtype=float)
    r = np.asarray(r, dtype=float)
    if r_d.shape != (3,) or r.shape != (3,):
        raise ValueError("euler_error expects two 3-vectors")
    return wrap_angle(r_d - r)
