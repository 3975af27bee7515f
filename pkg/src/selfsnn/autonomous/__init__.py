"""Autonomous self: cerebellar conditioning, speed generalisation, R-STDP decisions."""

from .conditioning import ConditioningCircuit, ConditioningConfig, TrialResult, conditioning_trial
from .decision import (
    ExperienceBuffer,
    ExperienceRecord,
    PolicyConfig,
    PolicyNetwork,
    TrainingRun,
    dm_decide,
    dm_select_action,
    dm_train_episode,
    explore_schedule,
    query_experience,
    record_experience,
    reward_flipped,
    train_policy,
    zero_reward,
)
from .gridworld import ACTIONS, MOVES, GridWorld
from .phenomena import PHENOMENA, ProtocolRun, default_circuit_factory, run_phenomenon, run_protocol
from .speed import AvoidanceConfig, cr_onset, default_corridor, speed_generalization

__all__ = [
    "ACTIONS",
    "AvoidanceConfig",
    "ConditioningCircuit",
    "ConditioningConfig",
    "ExperienceBuffer",
    "ExperienceRecord",
    "GridWorld",
    "MOVES",
    "PHENOMENA",
    "PolicyConfig",
    "PolicyNetwork",
    "ProtocolRun",
    "TrainingRun",
    "TrialResult",
    "conditioning_trial",
    "cr_onset",
    "default_circuit_factory",
    "default_corridor",
    "dm_decide",
    "dm_select_action",
    "dm_train_episode",
    "explore_schedule",
    "query_experience",
    "record_experience",
    "reward_flipped",
    "run_phenomenon",
    "run_protocol",
    "speed_generalization",
    "train_policy",
    "zero_reward",
]
