"""Closed-loop scenario execution and run summaries.

Loop structure: the controller runs at 200 Hz; each control tick's torque is
held while the plant integrates five 1 ms RK4 substeps. External loads are
evaluated once per tick against the live state and zero-order-held as well,
so the logged wrench is exactly what the plant felt. Everything is
deterministic: same scenario, same log, byte for byte.
"""

import time
from dataclasses import dataclass

import numpy as np

from . import dynamics, metrics, passivity
from .config import Scenario
from .controllers import ControlTick, compose
from .errors import DivergenceError
from .interaction import InteractionSchedule
from .kinematics import Pose, euler_error, jacobian_set, rpy_from_matrix
from .motion_gen import CircleMotionGenerator, ClassicalReference, circle_reference
from .trajlog import TrajectoryLog, column_names

CONTROL_RATE_HZ = 200.0
CONTROL_DT = 1.0 / CONTROL_RATE_HZ
PHYSICS_SUBSTEPS = 5
PHYSICS_DT = CONTROL_DT / PHYSICS_SUBSTEPS


def run(scenario: Scenario) -> TrajectoryLog:
    """Simulate one scenario and return the complete per-tick log."""
    scenario.validate()
    model = scenario.model
    cfg = scenario.controller
    task = scenario.task
    n = model.n
    classical = cfg.variant == "classical"

    generator = None if classical else CircleMotionGenerator(task)
    reference = ClassicalReference(task) if classical else None
    schedule = InteractionSchedule(scenario.events, model)
    monitor = passivity.StorageMonitor(model, cfg)

    state = dynamics.JointState(q=scenario.initial_q.copy(), qdot=np.zeros(n), t=0.0)
    ticks = int(round(scenario.duration * CONTROL_RATE_HZ))
    cols = column_names(n)
    data = np.empty((ticks + 1, len(cols)))

    r_d = task.orientation_target
    prev_ee_vel = None
    ee_acc = np.zeros(3)
    acc_alpha = 1.0 - np.exp(-2.0 * np.pi * 20.0 * CONTROL_DT)

    from . import _kernels  # local alias for the hot loop

    for k in range(ticks + 1):
        t = k * CONTROL_DT
        q, qdot = state.q, state.qdot
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(qdot))):
            raise DivergenceError(t, k, "non-finite joint state")

        T = _kernels.fk_frames(model.dh, q)
        pose = Pose(p=T[-1, :3, 3].copy(), r=rpy_from_matrix(T[-1, :3, :3]))
        jac = jacobian_set(model, q)
        twist = jac.J @ qdot
        ee_vel = twist[:3]

        if cfg.use_measured_accel:
            raw = np.zeros(3) if prev_ee_vel is None else (ee_vel - prev_ee_vel) / CONTROL_DT
            ee_acc = ee_acc + acc_alpha * (raw - ee_acc)
            prev_ee_vel = ee_vel.copy()

        if classical:
            p_d, pdot_d = reference.at(t)
            desired_pos, desired_vel = p_d, pdot_d
            ref_point = p_d
            cmd = None
            e_p_classical = p_d - pose.p
        else:
            cmd = generator.desired_velocity(pose.p, ee_vel, CONTROL_DT)
            desired_pos, desired_vel = cmd.p_tilde_d, cmd.p_tilde_d_dot
            ref_point = cmd.reference
            p_d = pdot_d = None
            e_p_classical = None

        qdot_d = jac.J_pinv @ np.concatenate([desired_vel, np.zeros(3)])
        gravity_comp = dynamics.gravity_torque(model, q)
        tick = ControlTick(
            q=q,
            qdot=qdot,
            pose=pose,
            jac=jac,
            cmd=cmd,
            qdot_d=qdot_d,
            gravity_comp=gravity_comp,
            r_d=r_d,
            ee_vel=ee_vel,
            tau_limits=model.tau_limits,
            ee_acc=ee_acc if cfg.use_measured_accel else None,
            classical_p_d=p_d,
            classical_pdot_d=pdot_d,
        )
        out = compose(cfg, tick)
        load = schedule.load(q, qdot, t)

        e_r = euler_error(r_d, pose.r)
        e_p_dot = desired_vel - ee_vel
        sample = monitor.sample(
            t, q, qdot, qdot_d, e_r, e_p_dot, load.tau_ext, jac.N, CONTROL_DT, e_p_classical
        )

        row = data[k]
        row[0] = t
        row[1 : 1 + n] = q
        row[1 + n : 1 + 2 * n] = qdot
        row[1 + 2 * n : 1 + 3 * n] = out.tau_total
        row[1 + 3 * n : 1 + 4 * n] = out.tau_c
        row[1 + 4 * n : 1 + 5 * n] = out.tau_n
        row[1 + 5 * n : 1 + 6 * n] = load.tau_ext
        base = 1 + 6 * n
        row[base : base + 3] = pose.p
        row[base + 3 : base + 6] = pose.r
        row[base + 6 : base + 12] = twist
        row[base + 12 : base + 15] = desired_pos
        row[base + 15 : base + 18] = desired_vel
        row[base + 18 : base + 24] = load.wrench
        row[base + 24 : base + 33] = [
            sample.S1,
            sample.S2,
            sample.S3,
            sample.S_extra,
            sample.S,
            sample.Sdot,
            sample.supply,
            sample.margin,
            sample.diss_quad,
        ]
        row[base + 33 : base + 36] = ref_point

        if k < ticks:
            for _ in range(PHYSICS_SUBSTEPS):
                state = dynamics.step(model, state, out.tau_total, load.tau_ext, PHYSICS_DT)

    meta = {
        "scenario": scenario.name,
        "variant": cfg.variant,
        "model": model.name,
        "seed": scenario.seed,
        "control-rate-hz": CONTROL_RATE_HZ,
    }
    return TrajectoryLog(n=n, data=data, meta=meta)


@dataclass
class RunResult:
    scenario: Scenario
    log: TrajectoryLog
    metrics: metrics.RunMetrics
    passivity: passivity.PassivityReport
    wall_time: float


def execute(scenario: Scenario) -> RunResult:
    """Run a scenario and evaluate metrics plus the passivity audit."""
    t0 = time.perf_counter()
    log = run(scenario)
    wall = time.perf_counter() - t0
    m = metrics.run_metrics(log, scenario.events, scenario.task, scenario.controller.variant)
    report = passivity.audit(log, model=scenario.model, cfg=scenario.controller)
    return RunResult(scenario=scenario, log=log, metrics=m, passivity=report, wall_time=wall)


def summary_text(result: RunResult) -> str:
    m = result.metrics
    fmt = lambda v: ", ".join("nan" if np.isnan(x) else f"{x:.3f}" for x in v)  # noqa: E731
    forces = ", ".join(f"{f:.2f}" for f in m.max_force_per_event) or "none"
    lines = [
        f"scenario: {result.scenario.name} (variant {m.variant})",
        f"duration: {result.scenario.duration:.1f} s   wall time: {result.wall_time:.2f} s",
        "",
        "tracking (NMAE %, z normalized by circle diameter)",
        f"  pre-interaction  X/Y/Z : {fmt(m.nmae_pre)}",
        f"  post-interaction X/Y/Z : {fmt(m.nmae_post)}",
        f"  orientation error max  : {m.orientation_error_max_deg:.3f} deg",
        f"  z deviation max        : {m.z_deviation_max * 1000:.2f} mm",
        "",
        "interaction",
        f"  per-event max force (N): {forces}",
        f"  joint deviation        : {m.joint_deviation_deg:.2f} deg"
        if not np.isnan(m.joint_deviation_deg)
        else "  joint deviation        : n/a",
        "",
        result.passivity.text(),
    ]
    return "\n".join(lines)
