"""Compliant control stack for redundant serial arms, with simulator and monitor."""

from .config import Scenario, data_path, default_model, load_model, load_scenario
from .controllers import ControlOutput, ControllerConfig
from .dynamics import DynamicsTerms, JointState
from .harness import RunResult, execute, run
from .interaction import ExternalLoad, InteractionEvent, InteractionSchedule
from .kinematics import JacobianSet, Pose, RobotModel
from .metrics import RunMetrics, comparison_table, nmae, run_metrics
from .motion_gen import CircleMotionGenerator, CircleTask, MotionCommand
from .passivity import PassivityReport, StorageSample, audit
from .trajlog import TrajectoryLog, from_csv

__version__ = "0.1.0"

__all__ = [
    "CircleMotionGenerator",
    "CircleTask",
    "ControlOutput",
    "ControllerConfig",
    "DynamicsTerms",
    "ExternalLoad",
    "InteractionEvent",
    "InteractionSchedule",
    "JacobianSet",
    "JointState",
    "MotionCommand",
    "PassivityReport",
    "Pose",
    "RobotModel",
    "RunMetrics",
    "RunResult",
    "Scenario",
    "StorageSample",
    "TrajectoryLog",
    "audit",
    "comparison_table",
    "data_path",
    "default_model",
    "execute",
    "from_csv",
    "load_model",
    "load_scenario",
    "nmae",
    "run",
    "run_metrics",
]
