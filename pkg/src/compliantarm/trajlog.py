"""Columnar per-tick trajectory records and their CSV serialization.

Column order is part of the output contract and never changes:
t, q*, qd*, tau_total*, tau_c*, tau_n*, tau_ext*, EE pose, EE twist,
desired position, desired velocity, external wrench, storage-sample block,
then the circle reference point used by the tracking metrics.

Floats are serialized with repr (shortest round-trip), so identical runs
produce byte-identical files and audits reload exact values.
"""

import io
from dataclasses import dataclass, field

import numpy as np

from .errors import AuditError

SCHEMA_VERSION = 1

POSE_COLS = ["ee_px", "ee_py", "ee_pz", "ee_rx", "ee_ry", "ee_rz"]
TWIST_COLS = ["ee_vx", "ee_vy", "ee_vz", "ee_wx", "ee_wy", "ee_wz"]
DESIRED_COLS = ["ptd_x", "ptd_y", "ptd_z"]
DESIRED_VEL_COLS = ["ptdd_x", "ptdd_y", "ptdd_z"]
WRENCH_COLS = ["ext_fx", "ext_fy", "ext_fz", "ext_tx", "ext_ty", "ext_tz"]
STORAGE_COLS = ["S1", "S2", "S3", "S_extra", "S", "Sdot", "supply", "margin", "diss_quad"]
REFERENCE_COLS = ["ref_x", "ref_y", "ref_z"]


def column_names(n: int):
    cols = ["t"]
    for prefix in ("q", "qd", "tau_total", "tau_c", "tau_n", "tau_ext"):
        cols += [f"{prefix}{k}" for k in range(1, n + 1)]
    cols += POSE_COLS + TWIST_COLS + DESIRED_COLS + DESIRED_VEL_COLS + WRENCH_COLS
    cols += STORAGE_COLS + REFERENCE_COLS
    return cols


@dataclass
class TrajectoryLog:
    n: int
    data: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.columns = column_names(self.n)
        self._index = {name: i for i, name in enumerate(self.columns)}
        if self.data.ndim != 2 or self.data.shape[1] != len(self.columns):
            raise ValueError(
                f"log data has {self.data.shape} columns, expected {len(self.columns)}"
            )

    def __len__(self):
        return self.data.shape[0]

    def col(self, name: str) -> np.ndarray:
        return self.data[:, self._index[name]]

    def cols(self, names) -> np.ndarray:
        return self.data[:, [self._index[n] for n in names]]

    def vec(self, prefix: str) -> np.ndarray:
        """Joint-indexed column group as (rows, n)."""
        return self.cols([f"{prefix}{k}" for k in range(1, self.n + 1)])

    @property
    def t(self) -> np.ndarray:
        return self.col("t")

    @property
    def dt(self) -> float:
        if len(self) < 2:
            raise AuditError("log has fewer than two rows; no tick spacing defined")
        return float(self.t[1] - self.t[0])

    def check_uniform(self, rel_tol: float = 1e-9):
        """Raise AuditError if tick spacing has gaps or jitter."""
        if len(self) < 2:
            return
        dts = np.diff(self.t)
        dt = dts[0]
        if dt <= 0 or np.any(np.abs(dts - dt) > rel_tol * max(dt, 1.0)):
            raise AuditError("log tick spacing is not uniform (gap or jitter detected)")

    def to_csv(self, path):
        with open(path, "w", newline="\n") as fh:
            self.write(fh)

    def write(self, fh):
        fh.write(f"# schema-version: {SCHEMA_VERSION}\n")
        for key in sorted(self.meta):
            fh.write(f"# {key}: {self.meta[key]}\n")
        fh.write(",".join(self.columns) + "\n")
        for row in self.data:
            fh.write(",".join(repr(v) for v in row) + "\n")

    def to_csv_bytes(self) -> bytes:
        buf = io.StringIO()
        self.write(buf)
        return buf.getvalue().encode()


def from_csv(path) -> TrajectoryLog:
    meta = {}
    header = None
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if ":" in body:
                    key, _, val = body.partition(":")
                    meta[key.strip()] = val.strip()
                continue
            if header is None:
                header = line.split(",")
                continue
            rows.append([float(v) for v in line.split(",")])
    if header is None or not rows:
        raise AuditError(f"{path}: no data rows found")
    n_joint_cols = sum(1 for c in header if c.startswith("q") and not c.startswith("qd"))
    data = np.asarray(rows, dtype=float)
    log = TrajectoryLog(n=n_joint_cols, data=data, meta=meta)
    if log.columns != header:
        raise AuditError(f"{path}: unexpected column layout")
    return log
