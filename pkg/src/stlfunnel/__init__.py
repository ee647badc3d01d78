"""Gradient-based funnel controllers for STL tasks on unicycle-like systems."""

from .combiner import Task, TaskBundle, combine, weight
from .controllers import ControllerSpec, GainSchedule
from .dynamics import NoiseSpec, SystemModel, single_integrator, unicycle_model
from .funnel import Curve, FunnelSpec, Region, classify, funnel_for_task
from .scenario import Scenario, load_scenario
from .simulator import SimConfig, Trajectory, check_satisfaction, run, simulate

__version__ = "0.1.0"

__all__ = [
    "Task", "TaskBundle", "combine", "weight",
    "ControllerSpec", "GainSchedule",
    "NoiseSpec", "SystemModel", "single_integrator", "unicycle_model",
    "Curve", "FunnelSpec", "Region", "classify", "funnel_for_task",
    "Scenario", "load_scenario",
    "SimConfig", "Trajectory", "check_satisfaction", "run", "simulate",
]
