"""Execution-time-aware inverse kinematics for dual-arm systems."""

from ._core import (
    ContractViolation,
    FormatError,
    Model,
    NoSolution,
    Scene,
    joint_move_time,
    solve,
)

__all__ = [
    "ContractViolation",
    "FormatError",
    "Model",
    "NoSolution",
    "Scene",
    "joint_move_time",
    "solve",
]
