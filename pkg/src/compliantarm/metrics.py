"""Quantitative evaluation of runs: tracking error, forces, joint deviations.

Tracking is scored as normalized maximum absolute error (NMAE): the largest
deviation between the desired and measured series, divided by the desired
series' range, as a percentage. The task plane has essentially zero desired
z-range, so the z denominator is replaced by the circle diameter; the table
header records this convention.
"""

import io
from dataclasses import dataclass, field

import numpy as np

from .errors import UndefinedMetricError
from .kinematics import euler_error
from .motion_gen import CircleTask
from .trajlog import TrajectoryLog

# Joints whose per-event excursion defines the "joint deviation" score
# (1-based indices; the elbow-adjacent pair that carries null-space motion).
DEVIATION_JOINTS = (3, 5)

CSV_COLUMNS = [
    "variant",
    "nmae_x_pre",
    "nmae_y_pre",
    "nmae_z_pre",
    "nmae_x_post",
    "nmae_y_post",
    "nmae_z_post",
    "max_force_1",
    "max_force_2",
    "joint_dev_deg",
]


@dataclass
class RunMetrics:
    variant: str
    nmae_pre: np.ndarray  # percent, per axis
    nmae_post: np.ndarray  # percent, per axis; NaN when no interaction happened
    max_force_per_event: list = field(default_factory=list)
    joint_deviation_deg: float = np.nan
    orientation_error_max_deg: float = np.nan
    z_deviation_max: float = np.nan


def nmae(desired, measured, denominator: float = None) -> float:
    """max |desired - measured| over the desired range, in percent."""
    desired = np.asarray(desired, dtype=float)
    measured = np.asarray(measured, dtype=float)
    if desired.shape != measured.shape:
        raise ValueError("series must have equal length")
    if denominator is None:
        denominator = float(np.max(desired) - np.min(desired))
        if denominator <= 0.0:
            raise UndefinedMetricError(
                "desired series has zero range; supply an explicit denominator"
            )
    return 100.0 * float(np.max(np.abs(desired - measured))) / denominator


def _nmae_xyz(log: TrajectoryLog, mask, z_denominator: float) -> np.ndarray:
    out = np.full(3, np.nan)
    if not np.any(mask):
        return out
    ref = log.cols(["ref_x", "ref_y", "ref_z"])[mask]
    meas = log.cols(["ee_px", "ee_py", "ee_pz"])[mask]
    for axis in range(3):
        denom = z_denominator if axis == 2 else None
        try:
            out[axis] = nmae(ref[:, axis], meas[:, axis], denom)
        except UndefinedMetricError:
            # degenerate window (e.g. a handful of samples before motion starts)
            out[axis] = nmae(ref[:, axis], meas[:, axis], z_denominator)
    return out


def interaction_stats(log: TrajectoryLog, events):
    """Per-event peak contact force and the mean joint excursion score."""
    t = log.t
    forces = np.linalg.norm(log.cols(["ext_fx", "ext_fy", "ext_fz"]), axis=1)
    q = log.vec("q")
    max_force = []
    deviations = []
    for ev in sorted(events, key=lambda e: e.t_start):
        window = (t >= ev.t_start) & (t <= ev.t_end)
        if not np.any(window):
            continue
        max_force.append(float(np.max(forces[window])))
        start_idx = int(np.argmax(window))
        for k in DEVIATION_JOINTS:
            dq = q[window, k - 1] - q[start_idx, k - 1]
            deviations.append(np.degrees(np.max(np.abs(dq))))
    joint_dev = float(np.mean(deviations)) if deviations else np.nan
    return max_force, joint_dev


def run_metrics(log: TrajectoryLog, events, task: CircleTask, variant: str) -> RunMetrics:
    """All Table-style scores for one run."""
    t = log.t
    z_denom = 2.0 * task.radius_desired
    starts = [ev.t_start for ev in events]
    first_start = min(starts) if starts else np.inf
    pre = t < first_start
    post = t >= first_start

    nmae_pre = _nmae_xyz(log, pre, z_denom)
    nmae_post = _nmae_xyz(log, post, z_denom)
    max_force, joint_dev = interaction_stats(log, events)

    r = log.cols(["ee_rx", "ee_ry", "ee_rz"])
    r_d = task.orientation_target
    orient_err = np.array([np.max(np.abs(euler_error(r_d, row))) for row in r])
    z_dev = np.max(np.abs(log.col("ee_pz") - task.z_target))

    return RunMetrics(
        variant=variant,
        nmae_pre=nmae_pre,
        nmae_post=nmae_post,
        max_force_per_event=max_force,
        joint_deviation_deg=joint_dev,
        orientation_error_max_deg=float(np.degrees(np.max(orient_err))),
        z_deviation_max=float(z_dev),
    )


def _row_values(m: RunMetrics):
    f1 = m.max_force_per_event[0] if len(m.max_force_per_event) > 0 else np.nan
    f2 = m.max_force_per_event[1] if len(m.max_force_per_event) > 1 else np.nan
    return [
        m.variant,
        *(f"{v:.3f}" for v in m.nmae_pre),
        *(f"{v:.3f}" for v in m.nmae_post),
        f"{f1:.3f}",
        f"{f2:.3f}",
        f"{m.joint_deviation_deg:.3f}",
    ]


def comparison_table(runs) -> tuple:
    """CSV text and aligned text table, one column block per run.

    `runs` is a list of RunMetrics; row order follows CSV_COLUMNS.
    """
    if not runs:
        raise ValueError("need at least one run")
    csv_buf = io.StringIO()
    csv_buf.write("# z-axis NMAE denominator: executed circle diameter\n")
    csv_buf.write(",".join(CSV_COLUMNS) + "\n")
    rows = [_row_values(m) for m in runs]
    for row in rows:
        csv_buf.write(",".join(str(v) for v in row) + "\n")

    labels = [
        "variant",
        "NMAE pre  X (%)",
        "NMAE pre  Y (%)",
        "NMAE pre  Z (%)",
        "NMAE post X (%)",
        "NMAE post Y (%)",
        "NMAE post Z (%)",
        "max force I (N)",
        "max force II (N)",
        "joint dev (deg)",
    ]
    width = max(len(str(v)) for row in rows for v in row) + 2
    text_lines = []
    for i, label in enumerate(labels):
        cells = "".join(str(row[i]).rjust(width) for row in rows)
        text_lines.append(f"{label:<18}{cells}")
    return csv_buf.getvalue(), "\n".join(text_lines)
