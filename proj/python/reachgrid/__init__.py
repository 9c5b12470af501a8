"""Reachability safety toolkit for two-car collision avoidance.

The compiled extension carries the mode pipeline, the vehicle and relative
dynamics, and a small one-dimensional solver entry point. The command line
tool (reachgrid) drives the full-scale solves and encounter simulations.
"""

from ._core import (
    ActionBounds,
    ActionSample,
    DrivingMode,
    HumanAction,
    HumanState,
    Interval,
    ModeProbabilities,
    ModeSet,
    NormalizationParams,
    RelativeState,
    RobotAction,
    RobotBounds,
    RobotState,
    Trajectory,
    TrajectorySample,
    VehicleParams,
    build_mode_set,
    classify_action,
    classify_trajectory,
    default_mode_nominals,
    extract_actions,
    load_modes,
    load_trajectory,
    relative_derivative,
    relative_state,
    rk4_human_step,
    rk4_robot_step,
    save_modes,
    save_trajectory,
    solve_interval_brt,
    steering_limit_for_omega,
)

__version__ = "0.1.0"

__all__ = [
    "ActionBounds",
    "ActionSample",
    "DrivingMode",
    "HumanAction",
    "HumanState",
    "Interval",
    "ModeProbabilities",
    "ModeSet",
    "NormalizationParams",
    "RelativeState",
    "RobotAction",
    "RobotBounds",
    "RobotState",
    "Trajectory",
    "TrajectorySample",
    "VehicleParams",
    "build_mode_set",
    "classify_action",
    "classify_trajectory",
    "default_mode_nominals",
    "extract_actions",
    "load_modes",
    "load_trajectory",
    "relative_derivative",
    "relative_state",
    "rk4_human_step",
    "rk4_robot_step",
    "save_modes",
    "save_trajectory",
    "solve_interval_brt",
    "steering_limit_for_omega",
]
