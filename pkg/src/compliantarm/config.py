"""Flat dotted-key config files: parsing, schemas, and the bundled defaults.

Format: one `key.path = value` assignment per line, `#` comments, blank
lines ignored. Values are floats, ints, bare strings, booleans, or bracketed
float lists. Unknown keys are hard errors so a typo in a gain name cannot
silently fall back to a default.

Scenario schema (see the bundled exp*.cfg files for working examples):

    model_file = <path, relative to the scenario file>
    duration = <s>          seed = <int>
    initial_q = [..n..]
    task.center_desired = [x, y, z]       task.radius_stored = <m>
    task.radius_desired = <m>             task.radial_gain = <1/s>
    task.angular_speed = <rad/s>          task.height_p_gain = <1/s>
    task.height_d_gain = <->              task.orientation_target = [r, p, y]
    controller.variant = proposed | baseline_no_nullspace | classical
    controller.cart_damping = [x, y, z]   controller.orient_stiffness = [...]
    controller.null_damping = <N m s/rad> controller.friction_gain = <->
    controller.damping_gain = <->         controller.vel_p_gain / vel_d_gain
    controller.use_measured_accel = true|false
    controller.classical_stiffness / classical_damping = [x, y, z]
    events.<k>.kind = ee_hold | body_push
    events.<k>.t_start / duration, plus per-kind fields
      (grasp_stiffness, grasp_damping | link_index, offset, direction,
       magnitude, push_stiffness, push_damping, rise_time, fall_time)
"""

import importlib.resources
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .controllers import ControllerConfig
from .errors import ConfigError
from .interaction import InteractionEvent
from .kinematics import RobotModel
from .motion_gen import CircleTask


def data_path(name: str) -> Path:
    """Path of a bundled data file (default model, canonical scenarios)."""
    return Path(importlib.resources.files("compliantarm").joinpath("data", name))


def _parse_value(raw: str, source, lineno):
    raw = raw.strip()
    if raw.startswith("["):
        if not raw.endswith("]"):
            raise ConfigError("unterminated list", source, lineno)
        body = raw[1:-1].strip()
        if not body:
            return []
        try:
            return [float(x) for x in body.split(",")]
        except ValueError:
            raise ConfigError(f"bad list value {raw!r}", source, lineno) from None
    lowered = raw.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        pass
    return raw


def parse_kv_file(path) -> dict:
    """Flat dict of dotted keys with line numbers preserved for errors."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"no such file: {path}")
    out = {}
    lines = {}
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError("expected 'key = value'", str(path), lineno)
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if not key:
            raise ConfigError("empty key", str(path), lineno)
        if key in out:
            raise ConfigError(f"duplicate key {key!r}", str(path), lineno)
        out[key] = _parse_value(raw, str(path), lineno)
        lines[key] = lineno
    out["__lines__"] = lines
    out["__source__"] = str(path)
    return out


class _KeyReader:
    """Tracks consumed keys so leftovers can be reported as unknown."""

    def __init__(self, kv: dict):
        self.kv = kv
        self.source = kv.get("__source__", "<config>")
        self.lines = kv.get("__lines__", {})
        self.seen = {"__lines__", "__source__"}

    def take(self, key, default=...):
        self.seen.add(key)
        if key in self.kv:
            return self.kv[key]
        if default is ...:
            raise ConfigError(f"missing required key {key!r}", self.source)
        return default

    def has(self, key) -> bool:
        return key in self.kv

    def finish(self):
        unknown = sorted(set(self.kv) - self.seen)
        if unknown:
            lineno = self.lines.get(unknown[0])
            raise ConfigError(f"unknown key(s): {', '.join(unknown)}", self.source, lineno)


def _as_vec(value, length, key, source):
    arr = np.asarray(value, dtype=float)
    if arr.shape != (length,):
        raise ConfigError(f"{key} must be a {length}-vector", source)
    return arr


def load_model(path) -> RobotModel:
    """Load and validate a robot model file."""
    kv = parse_kv_file(path)
    r = _KeyReader(kv)
    n = int(r.take("n"))
    if n < 1:
        raise ConfigError("n must be >= 1", r.source)
    name = str(r.take("name", Path(path).stem))
    gravity = _as_vec(r.take("gravity", [0.0, 0.0, -9.81]), 3, "gravity", r.source)
    v_eps = float(r.take("v_eps", 0.01))

    dh = np.zeros((n, 4))
    masses = np.zeros(n)
    coms = np.zeros((n, 3))
    inertias = np.zeros((n, 3, 3))
    viscous = np.zeros(n)
    coulomb = np.zeros(n)
    limits = np.zeros((n, 2))
    tau_limits = np.zeros(n)
    for k in range(1, n + 1):
        pre = f"joint.{k}."
        dh[k - 1] = _as_vec(r.take(pre + "dh"), 4, pre + "dh", r.source)
        masses[k - 1] = float(r.take(pre + "mass"))
        coms[k - 1] = _as_vec(r.take(pre + "com"), 3, pre + "com", r.source)
        diag = _as_vec(r.take(pre + "inertia_diag"), 3, pre + "inertia_diag", r.source)
        inertias[k - 1] = np.diag(diag)
        if r.has(pre + "inertia_offdiag"):
            od = _as_vec(r.take(pre + "inertia_offdiag"), 3, pre + "inertia_offdiag", r.source)
            inertias[k - 1][0, 1] = inertias[k - 1][1, 0] = od[0]
            inertias[k - 1][0, 2] = inertias[k - 1][2, 0] = od[1]
            inertias[k - 1][1, 2] = inertias[k - 1][2, 1] = od[2]
        viscous[k - 1] = float(r.take(pre + "viscous", 0.0))
        coulomb[k - 1] = float(r.take(pre + "coulomb", 0.0))
        limits[k - 1] = _as_vec(r.take(pre + "limits"), 2, pre + "limits", r.source)
        tau_limits[k - 1] = float(r.take(pre + "tau_limit", 80.0))
    r.finish()

    model = RobotModel(
        name=name,
        dh=dh,
        masses=masses,
        coms=coms,
        inertias=inertias,
        viscous=viscous,
        coulomb=coulomb,
        joint_limits=limits,
        tau_limits=tau_limits,
        gravity=gravity,
        v_eps=v_eps,
    )
    model.validate()
    return model


def default_model() -> RobotModel:
    return load_model(data_path("lwr_iv_plus.model"))


@dataclass
class Scenario:
    """One closed-loop run: model, task, controller, interactions, horizon."""

    model: RobotModel
    task: CircleTask
    controller: ControllerConfig
    events: list
    duration: float
    initial_q: np.ndarray
    seed: int = 0
    name: str = "scenario"

    def validate(self):
        if self.duration < 0:
            raise ConfigError("duration must be >= 0")
        self.initial_q = np.asarray(self.initial_q, dtype=float)
        if self.initial_q.shape != (self.model.n,):
            raise ConfigError(f"initial_q must have {self.model.n} entries")
        lo, hi = self.model.joint_limits[:, 0], self.model.joint_limits[:, 1]
        if np.any(self.initial_q < lo) or np.any(self.initial_q > hi):
            raise ConfigError("initial_q outside model joint limits")
        self.task.validate()
        self.controller.validate()
        for ev in self.events:
            ev.validate(self.model.n)


def _load_task(r: _KeyReader) -> CircleTask:
    return CircleTask(
        center_desired=_as_vec(r.take("task.center_desired"), 3, "task.center_desired", r.source),
        radius_stored=float(r.take("task.radius_stored", 0.10)),
        radius_desired=float(r.take("task.radius_desired", 0.10)),
        radial_gain=float(r.take("task.radial_gain", 2.0)),
        angular_speed=float(r.take("task.angular_speed", 0.35)),
        height_p_gain=float(r.take("task.height_p_gain", 5.0)),
        height_d_gain=float(r.take("task.height_d_gain", 1.0)),
        orientation_target=_as_vec(
            r.take("task.orientation_target", [np.pi, 0.0, np.pi]),
            3,
            "task.orientation_target",
            r.source,
        ),
    )


def _load_controller(r: _KeyReader) -> ControllerConfig:
    cfg = ControllerConfig(variant=str(r.take("controller.variant", "proposed")))
    vec_keys = ("cart_damping", "orient_stiffness", "classical_stiffness", "classical_damping")
    for key in vec_keys:
        full = f"controller.{key}"
        if r.has(full):
            setattr(cfg, key, _as_vec(r.take(full), 3, full, r.source))
    for key in ("null_damping", "friction_gain", "damping_gain", "vel_p_gain", "vel_d_gain"):
        full = f"controller.{key}"
        if r.has(full):
            setattr(cfg, key, float(r.take(full)))
    if r.has("controller.use_measured_accel"):
        cfg.use_measured_accel = bool(r.take("controller.use_measured_accel"))
    return cfg


def _load_events(r: _KeyReader) -> list:
    indices = sorted(
        {int(k.split(".")[1]) for k in r.kv if k.startswith("events.") and k.count(".") >= 2}
    )
    events = []
    for i in indices:
        pre = f"events.{i}."
        kind = str(r.take(pre + "kind"))
        ev = InteractionEvent(
            kind=kind,
            t_start=float(r.take(pre + "t_start")),
            duration=float(r.take(pre + "duration")),
        )
        if kind == "ee_hold":
            ev.grasp_stiffness = float(r.take(pre + "grasp_stiffness", ev.grasp_stiffness))
            ev.grasp_damping = float(r.take(pre + "grasp_damping", ev.grasp_damping))
        else:
            ev.link_index = int(r.take(pre + "link_index", ev.link_index))
            ev.offset = _as_vec(r.take(pre + "offset", [0.0, 0.0, 0.0]), 3, pre + "offset", r.source)
            ev.direction = _as_vec(
                r.take(pre + "direction", [0.0, 1.0, 0.0]), 3, pre + "direction", r.source
            )
            ev.magnitude = float(r.take(pre + "magnitude", ev.magnitude))
            ev.push_stiffness = float(r.take(pre + "push_stiffness", ev.push_stiffness))
            ev.push_damping = float(r.take(pre + "push_damping", ev.push_damping))
            ev.rise_time = float(r.take(pre + "rise_time", ev.rise_time))
            ev.fall_time = float(r.take(pre + "fall_time", ev.fall_time))
        events.append(ev)
    return events


def load_scenario(path, variant_override: str = None) -> Scenario:
    """Load a scenario file; `variant_override` swaps the controller variant."""
    path = Path(path)
    kv = parse_kv_file(path)
    r = _KeyReader(kv)

    model_file = str(r.take("model_file"))
    model_path = Path(model_file)
    if not model_path.is_absolute():
        candidate = path.parent / model_path
        model_path = candidate if candidate.exists() else data_path(model_file)
    model = load_model(model_path)

    duration = float(r.take("duration"))
    seed = int(r.take("seed", 0))
    initial_q = np.asarray(r.take("initial_q"), dtype=float)
    task = _load_task(r)
    controller = _load_controller(r)
    events = _load_events(r)
    r.finish()

    if variant_override is not None:
        controller.variant = variant_override
    scenario = Scenario(
        model=model,
        task=task,
        controller=controller,
        events=events,
        duration=duration,
        initial_q=initial_q,
        seed=seed,
        name=path.stem,
    )
    scenario.validate()
    return scenario
