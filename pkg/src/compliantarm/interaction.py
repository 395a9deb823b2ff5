"""Scripted external interactions: the plant-side "unknown" loads.

Two virtual humans are modeled, both as compliant hands rather than
prescribed wrenches so that the transmitted force depends on how much the
robot yields -- a stiff controller makes the same scripted intent produce a
larger contact force, which is the contrast the comparison metrics measure.

Only the simulator consumes these loads; controllers never see them.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError
from .kinematics import RobotModel, contact_jacobian, frames

KINDS = ("ee_hold", "body_push")


@dataclass
class InteractionEvent:
    """One scripted interaction window.

    ee_hold: a hand grasps the EE where it is at onset and holds it there
    (spring-damper to the latched grasp point).

    body_push: a hand pushes a point on a link along a fixed direction. The
    intended penetration follows a trapezoid (0.3 s rise and fall) scaled so
    that a structure that does not yield sees a peak force of `magnitude`;
    a yielding structure sees correspondingly less.
    """

    kind: str
    t_start: float
    duration: float
    # ee_hold parameters
    grasp_stiffness: float = 400.0
    grasp_damping: float = 40.0
    # body_push parameters
    link_index: int = 4
    offset: np.ndarray = field(default_factory=lambda: np.zeros(3))
    direction: np.ndarray = field(default_factory=lambda: np.array([0.0, 1.0, 0.0]))
    magnitude: float = 30.0
    push_stiffness: float = 500.0
    push_damping: float = 30.0
    rise_time: float = 0.3
    fall_time: float = 0.3

    def __post_init__(self):
        self.offset = np.asarray(self.offset, dtype=float)
        self.direction = np.asarray(self.direction, dtype=float)

    def validate(self, n_joints: Optional[int] = None):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown interaction kind {self.kind!r}; use one of {KINDS}")
        if self.duration <= 0:
            raise ConfigError("event duration must be > 0")
        if self.t_start < 0:
            raise ConfigError("event t_start must be >= 0")
        if self.kind == "ee_hold":
            if self.grasp_stiffness < 0 or self.grasp_damping < 0:
                raise ConfigError("grasp stiffness/damping must be >= 0")
        else:
            if not np.isclose(np.linalg.norm(self.direction), 1.0, atol=1e-6):
                raise ConfigError("push direction must be a unit vector")
            if self.magnitude < 0 or self.push_stiffness <= 0 or self.push_damping < 0:
                raise ConfigError("push magnitude/stiffness/damping out of range")
            if self.rise_time < 0 or self.fall_time < 0:
                raise ConfigError("rise/fall times must be >= 0")
            if self.rise_time + self.fall_time > self.duration:
                raise ConfigError("rise + fall exceeds the event duration")
            if n_joints is not None and not 1 <= self.link_index <= n_joints:
                raise ConfigError(f"push link_index {self.link_index} out of range 1..{n_joints}")

    @property
    def t_end(self) -> float:
        return self.t_start + self.duration

    def active(self, t: float) -> bool:
        return self.t_start <= t <= self.t_end

    def contact_key(self):
        """Identity of the contact point, for overlap validation."""
        if self.kind == "ee_hold":
            return ("ee",)
        return ("link", self.link_index, tuple(np.round(self.offset, 9)))


@dataclass
class ExternalLoad:
    """Contact wrench (base frame, at the contact point) and its joint torques."""

    wrench: np.ndarray
    tau_ext: np.ndarray


def trapezoid(t_rel: float, duration: float, rise: float, fall: float) -> float:
    """Unit trapezoid over [0, duration]: linear rise, plateau, linear fall."""
    if t_rel < 0.0 or t_rel > duration:
        return 0.0
    if rise > 0.0 and t_rel < rise:
        return t_rel / rise
    if fall > 0.0 and t_rel > duration - fall:
        return (duration - t_rel) / fall
    return 1.0


def ee_hold_load(
    event: InteractionEvent, model: RobotModel, q, qdot, t: float, grasp_point
) -> ExternalLoad:
    """Spring-damper hand holding the EE near the latched grasp point."""
    n = model.n
    if not event.active(t):
        return ExternalLoad(np.zeros(6), np.zeros(n))
    J = contact_jacobian(model, q, n, np.zeros(3))
    p = frames(model, q)[-1, :3, 3]
    pdot = J[:3] @ np.asarray(qdot, dtype=float)
    force = event.grasp_stiffness * (np.asarray(grasp_point) - p) - event.grasp_damping * pdot
    wrench = np.concatenate([force, np.zeros(3)])
    return ExternalLoad(wrench=wrench, tau_ext=J.T @ wrench)


def body_push_load(
    event: InteractionEvent, model: RobotModel, q, qdot, t: float, contact_origin
) -> ExternalLoad:
    """Pushing hand at a link point: trapezoidal intent through a contact spring.

    The hand anchor advances along `direction` from the latched contact point
    by (magnitude / push_stiffness) * trapezoid(t); the transmitted force is
    the positive part of the axial spring-damper force (hands cannot pull).
    Joints distal to the contact link receive exactly zero torque.
    """
    n = model.n
    if not event.active(t):
        return ExternalLoad(np.zeros(6), np.zeros(n))
    J = contact_jacobian(model, q, event.link_index, event.offset)
    T = frames(model, q)[event.link_index]
    point = T[:3, 3] + T[:3, :3] @ event.offset
    point_vel = J[:3] @ np.asarray(qdot, dtype=float)

    profile = trapezoid(t - event.t_start, event.duration, event.rise_time, event.fall_time)
    reach = (event.magnitude / event.push_stiffness) * profile
    axis = event.direction
    penetration = reach - (point - np.asarray(contact_origin)) @ axis
    f_axial = event.push_stiffness * penetration - event.push_damping * (point_vel @ axis)
    f_axial = max(f_axial, 0.0)
    wrench = np.concatenate([f_axial * axis, np.zeros(3)])
    return ExternalLoad(wrench=wrench, tau_ext=J.T @ wrench)


class InteractionSchedule:
    """Evaluates the scripted events against the live state.

    Owns the per-event latch points (grasp point / push contact origin),
    which are set at the first evaluation inside each event's window. One
    schedule instance belongs to one simulation.
    """

    def __init__(self, events, model: RobotModel):
        self.events = list(events)
        self.model = model
        for ev in self.events:
            ev.validate(model.n)
        self._check_overlaps()
        self._latch = [None] * len(self.events)

    def _check_overlaps(self):
        by_key = {}
        for ev in self.events:
            by_key.setdefault(ev.contact_key(), []).append(ev)
        for key, evs in by_key.items():
            evs = sorted(evs, key=lambda e: e.t_start)
            for a, b in zip(evs, evs[1:]):
                if b.t_start < a.t_end:
                    raise ConfigError(
                        f"events at contact point {key} overlap in time "
                        f"([{a.t_start}, {a.t_end}] vs [{b.t_start}, {b.t_end}])"
                    )

    def _latch_point(self, idx, ev, q):
        if self._latch[idx] is None:
            T = frames(self.model, q)
            if ev.kind == "ee_hold":
                self._latch[idx] = T[-1, :3, 3].copy()
            else:
                Tl = T[ev.link_index]
                self._latch[idx] = Tl[:3, 3] + Tl[:3, :3] @ ev.offset
        return self._latch[idx]

    def load(self, q, qdot, t: float) -> ExternalLoad:
        """Superposition of all active loads; zero when none are active."""
        total_tau = np.zeros(self.model.n)
        total_wrench = np.zeros(6)
        for idx, ev in enumerate(self.events):
            if not ev.active(t):
                continue
            anchor = self._latch_point(idx, ev, q)
            if ev.kind == "ee_hold":
                load = ee_hold_load(ev, self.model, q, qdot, t, anchor)
            else:
                load = body_push_load(ev, self.model, q, qdot, t, anchor)
            total_tau += load.tau_ext
            total_wrench += load.wrench
        return ExternalLoad(wrench=total_wrench, tau_ext=total_tau)
