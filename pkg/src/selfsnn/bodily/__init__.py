"""Bodily self: motor-visual association, self/world distinction, mirror test, rubber hand."""

from .mirror_test import TRIAL_CSV_HEADER, MirrorTestResult, run_mirror_test
from .motor_visual import (
    AssociationMap,
    MotorCommand,
    MotorPopulation,
    PlanarArm,
    Trajectory,
    babble,
    classify_self_world,
    learn_motor_visual,
    predict_trajectory,
    prediction_error,
    random_command,
    trajectory_score,
)
from .rubber_hand import DriftResult, RubberHandConfig, congruent_offset, drift_profile, run_rubber_hand

__all__ = [
    "AssociationMap",
    "DriftResult",
    "MirrorTestResult",
    "MotorCommand",
    "MotorPopulation",
    "PlanarArm",
    "RubberHandConfig",
    "TRIAL_CSV_HEADER",
    "Trajectory",
    "babble",
    "classify_self_world",
    "congruent_offset",
    "drift_profile",
    "learn_motor_visual",
    "predict_trajectory",
    "prediction_error",
    "random_command",
    "run_mirror_test",
    "run_rubber_hand",
    "trajectory_score",
]
