"""Social self: perspective taking, false beliefs, hazard warning, empathy."""

from .belief import (
    FALSE_BELIEF_SCENARIOS,
    MODES,
    Belief,
    GateConfig,
    build_history,
    infer_belief,
    inhibitory_gate,
    run_false_belief_task,
    straight_path,
    warn_of_hazard,
)
from .empathy import (
    EMOTIONS,
    EmotionState,
    MirrorConfig,
    MirrorSystem,
    decide_altruistic,
    observe_action_empathy,
    train_mirror_system,
)
from .perspective import FACINGS, AgentPose, View, WorldState, in_cone, line_cells, line_of_sight, perspective_transform

__all__ = [
    "AgentPose",
    "Belief",
    "EMOTIONS",
    "EmotionState",
    "FACINGS",
    "FALSE_BELIEF_SCENARIOS",
    "GateConfig",
    "MODES",
    "MirrorConfig",
    "MirrorSystem",
    "View",
    "WorldState",
    "build_history",
    "decide_altruistic",
    "in_cone",
    "infer_belief",
    "inhibitory_gate",
    "line_cells",
    "line_of_sight",
    "observe_action_empathy",
    "perspective_transform",
    "run_false_belief_task",
    "straight_path",
    "train_mirror_system",
    "warn_of_hazard",
]
