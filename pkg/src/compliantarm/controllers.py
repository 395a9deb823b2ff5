"""Torque-level control laws.

Design constraint, enforced structurally: controllers see joint positions,
joint velocities and kinematics-derived quantities only. No operation here
accepts mass/Coriolis terms or external torques, and this module must never
import the dynamics module -- gravity compensation arrives as a plain vector
computed by the caller, which is the single sanctioned dynamics quantity.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError
from .kinematics import JacobianSet, Pose, euler_error
from .motion_gen import MotionCommand, pd_velocity_command

VARIANTS = ("proposed", "baseline_no_nullspace", "classical")


@dataclass
class ControllerConfig:
    """Gains for all controller variants; diagonal matrices stored as 3-vectors."""

    variant: str = "proposed"
    cart_damping: np.ndarray = field(default_factory=lambda: np.array([40.0, 40.0, 10.0]))
    orient_stiffness: np.ndarray = field(default_factory=lambda: np.array([15.0, 15.0, 15.0]))
    null_damping: float = 5.0
    friction_gain: float = 1.0
    damping_gain: float = 1.0
    vel_p_gain: float = 1.0
    vel_d_gain: float = 0.0
    use_measured_accel: bool = False
    classical_stiffness: np.ndarray = field(default_factory=lambda: np.array([30.0, 30.0, 30.0]))
    classical_damping: np.ndarray = field(default_factory=lambda: np.array([40.0, 40.0, 10.0]))

    def __post_init__(self):
        self.cart_damping = np.asarray(self.cart_damping, dtype=float)
        self.orient_stiffness = np.asarray(self.orient_stiffness, dtype=float)
        self.classical_stiffness = np.asarray(self.classical_stiffness, dtype=float)
        self.classical_damping = np.asarray(self.classical_damping, dtype=float)

    def validate(self):
        if self.variant not in VARIANTS:
            raise ConfigError(f"unknown controller variant {self.variant!r}; use one of {VARIANTS}")
        for name in ("cart_damping", "orient_stiffness", "classical_stiffness", "classical_damping"):
            v = getattr(self, name)
            if v.shape != (3,):
                raise ConfigError(f"controller.{name} must be a 3-vector of diagonal entries")
            if np.any(v < 0):
                raise ConfigError(f"controller.{name} entries must be >= 0")
        if self.null_damping < 0 or self.friction_gain < 0:
            raise ConfigError("null_damping and friction_gain must be >= 0")
        if self.vel_p_gain <= 0 or self.vel_d_gain < 0:
            raise ConfigError("vel_p_gain must be > 0 and vel_d_gain >= 0")


@dataclass
class ControlTick:
    """Everything a controller is allowed to see for one 200 Hz tick."""

    q: np.ndarray
    qdot: np.ndarray
    pose: Pose
    jac: JacobianSet
    cmd: MotionCommand
    qdot_d: np.ndarray  # J_pinv @ [desired translational velocity; 0 0 0]
    gravity_comp: np.ndarray  # G(q), supplied by the caller
    r_d: np.ndarray
    ee_vel: np.ndarray  # measured translational EE velocity, J[:3] @ qdot
    tau_limits: np.ndarray
    ee_acc: Optional[np.ndarray] = None  # filtered measured EE acceleration
    classical_p_d: Optional[np.ndarray] = None
    classical_pdot_d: Optional[np.ndarray] = None


@dataclass
class ControlOutput:
    tau_c: np.ndarray
    tau_n: np.ndarray
    F_c: np.ndarray
    tau_total: np.ndarray
    p_c_dot: np.ndarray


def cartesian_force(cfg: ControllerConfig, p_c_dot, r_d, r) -> np.ndarray:
    """Stacked 6-vector: damped commanded velocity and orientation spring."""
    f_v = cfg.cart_damping * np.asarray(p_c_dot, dtype=float)
    f_w = cfg.orient_stiffness * euler_error(r_d, r)
    return np.concatenate([f_v, f_w])


def cartesian_torque(J, F_c) -> np.ndarray:
    """Map a Cartesian wrench to joint torques through the transposed Jacobian."""
    J = np.asarray(J, dtype=float)
    F_c = np.asarray(F_c, dtype=float)
    if J.shape[0] != F_c.shape[0]:
        raise ValueError("J rows and wrench length differ")
    return J.T @ F_c


def nullspace_torque(cfg: ControllerConfig, N, qdot_d, qdot) -> np.ndarray:
    """Null-space impedance: projected friction feedforward plus velocity damping.

    tau_n = N (null_damping * friction_gain * qdot_d
              + damping_gain * (qdot_d - qdot))
    """
    N = np.asarray(N, dtype=float)
    qdot_d = np.asarray(qdot_d, dtype=float)
    qdot = np.asarray(qdot, dtype=float)
    inner = cfg.null_damping * cfg.friction_gain * qdot_d + cfg.damping_gain * (qdot_d - qdot)
    return N @ inner


def classical_torque(cfg: ControllerConfig, J, p_d, p, pdot_d, pdot, r_d, r) -> np.ndarray:
    """Position-anchored impedance: stiffness/damping to a timed reference."""
    f_v = cfg.classical_stiffness * (np.asarray(p_d) - np.asarray(p)) + cfg.classical_damping * (
        np.asarray(pdot_d) - np.asarray(pdot)
    )
    f_w = cfg.orient_stiffness * euler_error(r_d, r)
    return cartesian_torque(J, np.concatenate([f_v, f_w]))


def compose(cfg: ControllerConfig, tick: ControlTick) -> ControlOutput:
    """One full control tick for the configured variant, with torque saturation."""
    n = tick.q.shape[0]
    if cfg.variant == "classical":
        if tick.classical_p_d is None or tick.classical_pdot_d is None:
            raise ValueError("classical variant needs a timed reference in the tick")
        f_v = cfg.classical_stiffness * (tick.classical_p_d - tick.pose.p) + cfg.classical_damping * (
            tick.classical_pdot_d - tick.ee_vel
        )
        f_w = cfg.orient_stiffness * euler_error(tick.r_d, tick.pose.r)
        F_c = np.concatenate([f_v, f_w])
        p_c_dot = np.zeros(3)
        tau_c = cartesian_torque(tick.jac.J, F_c)
        tau_n = np.zeros(n)
    else:
        ee_acc = tick.ee_acc if (cfg.use_measured_accel and tick.ee_acc is not None) else np.zeros(3)
        p_c_dot = pd_velocity_command(tick.cmd, tick.ee_vel, ee_acc, cfg.vel_p_gain, cfg.vel_d_gain)
        F_c = cartesian_force(cfg, p_c_dot, tick.r_d, tick.pose.r)
        tau_c = cartesian_torque(tick.jac.J, F_c)
        if cfg.variant == "proposed":
            tau_n = nullspace_torque(cfg, tick.jac.N, tick.qdot_d, tick.qdot)
        else:
            tau_n = np.zeros(n)

    tau_total = tick.gravity_comp + tau_c + tau_n
    tau_total = np.clip(tau_total, -tick.tau_limits, tick.tau_limits)
    return ControlOutput(tau_c=tau_c, tau_n=tau_n, F_c=F_c, tau_total=tau_total, p_c_dot=p_c_dot)
