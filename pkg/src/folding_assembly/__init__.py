"""Simulation and control of dual-arm folding assembly."""

from .config import ScenarioConfig, load_config, write_config
from .controller import ControllerGains, Phase, controller_step, feedback_linearize
from .estimator import ContactEstimate, WrenchFilter, estimate_contact, estimate_r2, estimate_theta
from .kinetostatics import ContactMode, GraspMode, PieceSide, constraint_rows, reaction_wrench_basis
from .simulator import RunLog, RunStatus, run_loop
from .spatial_math import Pose, Twist, Wrench, integrate_rotation, project_tangent, skew

__all__ = [
    "ContactEstimate", "ContactMode", "ControllerGains", "GraspMode", "Phase", "PieceSide", "Pose",
    "RunLog", "RunStatus", "ScenarioConfig", "Twist", "Wrench", "WrenchFilter", "constraint_rows",
    "controller_step", "estimate_contact", "estimate_r2", "estimate_theta", "feedback_linearize",
    "integrate_rotation", "load_config", "project_tangent", "reaction_wrench_basis", "run_loop",
    "skew", "write_config",
]  # fmt: skip
