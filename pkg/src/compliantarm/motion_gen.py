"""State-dependent circular motion generation.

The generator is a velocity field over the measured EE position: the radial
rate pulls toward the target circle, the angular rate advances at a constant
user speed, and the height channel is a PD law toward a fixed plane. Because
the field depends on the measured state only, motion resumes smoothly after
any interruption; there is no clock to rewind and no replanning step.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

# EE closer than this to the circle axis has no defined polar angle; the
# previous angle is held and the field degenerates to pure radial outflow.
DEGENERATE_RADIUS = 1e-6


def _lowpass_alpha(cutoff_hz, dt):
    return 1.0 - np.exp(-2.0 * np.pi * cutoff_hz * dt)


@dataclass
class CircleTask:
    """Geometry and gains of the circle-tracing task.

    The stored path is normalized to a unit circle of radius `radius_stored`
    centered at the origin; `center_desired` and `radius_desired` place and
    scale the executed copy.
    """

    center_desired: np.ndarray
    radius_stored: float = 0.10
    radius_desired: float = 0.10
    radial_gain: float = 2.0
    angular_speed: float = 0.35
    height_p_gain: float = 5.0
    height_d_gain: float = 1.0
    orientation_target: np.ndarray = field(
        default_factory=lambda: np.array([np.pi, 0.0, np.pi])
    )

    def __post_init__(self):
        self.center_desired = np.asarray(self.center_desired, dtype=float)
        self.orientation_target = np.asarray(self.orientation_target, dtype=float)

    def validate(self):
        if self.center_desired.shape != (3,):
            raise ConfigError("task center must be a 3-vector")
        if self.radius_stored <= 0 or self.radius_desired <= 0:
            raise ConfigError("task radii must be > 0")
        if self.radial_gain <= 0 or self.angular_speed <= 0:
            raise ConfigError("radial_gain and angular_speed must be > 0")
        if self.height_p_gain <= 0 or self.height_d_gain < 0:
            raise ConfigError("height gains must be positive (P) / nonnegative (D)")

    @property
    def scale(self) -> float:
        """Radial scaling from the stored to the executed circle."""
        return self.radius_desired / self.radius_stored

    @property
    def z_target(self) -> float:
        return float(self.center_desired[2])


@dataclass
class MotionCommand:
    """One tick of desired EE translation state."""

    p_tilde_d: np.ndarray
    p_tilde_d_dot: np.ndarray
    p_tilde_d_ddot: np.ndarray
    reference: np.ndarray  # nearest point on the executed circle (metrics anchor)
    rho: float
    delta: float


def _polar(task: CircleTask, p, fallback_delta):
    """Scaled polar coordinates of p about the executed-circle center."""
    s = task.scale
    d = np.asarray(p, dtype=float) - task.center_desired
    dx, dy = d[0] / s, d[1] / s
    rho = np.hypot(dx, dy)
    delta = fallback_delta if rho < DEGENERATE_RADIUS else np.arctan2(dy, dx)
    return rho, delta


def transform_target(task: CircleTask, p, fallback_delta: float = 0.0) -> np.ndarray:
    """Desired position: the measured point re-expressed on the task geometry.

    In the plane this is the identity composed with the radial scaling (the
    normalized stored circle sits at the origin); the height is pinned to the
    task plane. Convergence to the circle itself is the velocity field's job.
    """
    rho, delta = _polar(task, p, fallback_delta)
    s = task.scale
    out = np.array([s * rho * np.cos(delta), s * rho * np.sin(delta), 0.0])
    return out + task.center_desired


def velocity_field(task: CircleTask, p, pdot, fallback_delta: float = 0.0):
    """Instantaneous desired velocity at the measured state.

    Radial rate: radial_gain * (radius_stored - rho) in scaled coordinates,
    so the attractor maps onto the executed circle. Angular rate is constant.
    Height: PD toward the fixed task plane. Returns (pd_dot, rho, delta).
    """
    rho, delta = _polar(task, p, fallback_delta)
    s = task.scale
    rho_dot = task.radial_gain * (task.radius_stored - rho)
    delta_dot = task.angular_speed
    vx = s * (rho_dot * np.cos(delta) - rho * delta_dot * np.sin(delta))
    vy = s * (rho_dot * np.sin(delta) + rho * delta_dot * np.cos(delta))
    vz = task.height_p_gain * (task.z_target - p[2]) + task.height_d_gain * (0.0 - pdot[2])
    return np.array([vx, vy, vz]), rho, delta


def circle_reference(task: CircleTask, delta) -> np.ndarray:
    """Point on the executed circle at polar angle delta (tracking-error anchor)."""
    return task.center_desired + np.array(
        [task.radius_desired * np.cos(delta), task.radius_desired * np.sin(delta), 0.0]
    )


class CircleMotionGenerator:
    """Owns the per-run differentiation filter and the held polar angle.

    One instance per simulation; not thread-safe across simulations.
    """

    def __init__(self, task: CircleTask, accel_cutoff_hz: float = 20.0):
        task.validate()
        self.task = task
        self.accel_cutoff_hz = accel_cutoff_hz
        self._last_delta = 0.0
        self._last_vel = None
        self._accel = np.zeros(3)

    def desired_velocity(self, p, pdot, dt: float) -> MotionCommand:
        """Full motion command; acceleration by filtered backward difference."""
        if dt <= 0:
            raise ValueError("dt must be > 0")
        vel, rho, delta = velocity_field(self.task, p, pdot, self._last_delta)
        self._last_delta = delta
        if self._last_vel is None:
            raw_acc = np.zeros(3)
        else:
            raw_acc = (vel - self._last_vel) / dt
        self._last_vel = vel.copy()
        alpha = _lowpass_alpha(self.accel_cutoff_hz, dt)
        self._accel = self._accel + alpha * (raw_acc - self._accel)
        return MotionCommand(
            p_tilde_d=transform_target(self.task, p, delta),
            p_tilde_d_dot=vel,
            p_tilde_d_ddot=self._accel.copy(),
            reference=circle_reference(self.task, delta),
            rho=rho,
            delta=delta,
        )


def pd_velocity_command(cmd: MotionCommand, pdot, pddot, k_p: float, k_d: float) -> np.ndarray:
    """Commanded Cartesian velocity from desired-motion and measured-motion errors."""
    if k_p <= 0 or k_d < 0:
        raise ValueError("gains must be positive (k_p) / nonnegative (k_d)")
    out = k_p * (cmd.p_tilde_d_dot - np.asarray(pdot, dtype=float))
    if k_d != 0.0:
        out = out + k_d * (cmd.p_tilde_d_ddot - np.asarray(pddot, dtype=float))
    return out


class ClassicalReference:
    """Time-parameterized constant-speed circle for the classical comparator.

    Starts at angle 0 with a short radial ramp-in so a center-started run has
    a bounded initial error; angular speed matches the generator's so the two
    controller families face like-for-like interaction timing.
    """

    def __init__(self, task: CircleTask, ramp_time: float = 3.0):
        task.validate()
        self.task = task
        self.ramp_time = ramp_time

    def at(self, t: float):
        """Desired position and velocity at time t."""
        task = self.task
        w = task.angular_speed
        ang = w * t
        if self.ramp_time > 0 and t < self.ramp_time:
            r = task.radius_desired * (t / self.ramp_time)
            r_dot = task.radius_desired / self.ramp_time
        else:
            r = task.radius_desired
            r_dot = 0.0
        c, s = np.cos(ang), np.sin(ang)
        p = task.center_desired + np.array([r * c, r * s, 0.0])
        v = np.array([r_dot * c - r * w * s, r_dot * s + r * w * c, 0.0])
        return p, v
