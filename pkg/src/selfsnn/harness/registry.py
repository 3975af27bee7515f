"""Registered experiments, their self-level tag and typed parameter defaults."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from . import experiments as ex

LEVELS = ("L0", "L1", "L2", "L3")


@dataclass(frozen=True)
class Experiment:
    name: str
    level: str
    description: str
    defaults: dict
    body: Callable

    def __post_init__(self):
        if self.level not in LEVELS:
            raise ValueError(f"level must be one of {LEVELS}")


REGISTRY: dict[str, Experiment] = {
    e.name: e
    for e in [
        Experiment("lif-oracle", "L0", "LIF first-spike time vs closed form over random parameter draws",
                   {"draws": 20, "dt": 1.0}, ex.lif_oracle),
        Experiment("plasticity-math", "L0", "STDP window and linear CKA against definitional oracles",
                   {"instances": 20}, ex.plasticity_math),
        Experiment("concept-fusion", "L0", "Bimodal concept fusion by sliding coordination",
                   {"classes": 10, "test_per_class": 20}, ex.concept_fusion),
        Experiment("continual", "L0", "Grow-prune-sleep continual learning vs naive sequential training",
                   {"neurons_per_task": 32, "epochs": 40, "sleep_epochs": 20}, ex.continual),
        Experiment("mirror-test", "L1", "Self-recognition among identical agents in front of mirrors",
                   {"agents": 3, "trials": 100, "noise": 0.02}, ex.mirror_test),
        Experiment("rubber-hand", "L1", "Proprioceptive drift across rubber-hand deflection angles",
                   {"small_angle": 20.0, "max_angle": 60.0, "step": 2.0}, ex.rubber_hand),
        Experiment("self-world", "L1", "Self vs world motion from learned motor-visual prediction",
                   {"babble": 300, "tests": 50}, ex.self_world),
        Experiment("conditioning", "L2", "Six classical-conditioning phenomena on the cerebellar circuit",
                   {}, ex.conditioning),
        Experiment("speed-generalization", "L2", "Obstacle avoidance trained at 1x, tested at higher speed",
                   {"test_speed": 3.5}, ex.speed),
        Experiment("rstdp-gridworld", "L2", "R-STDP decision making in a 5x5 gridworld",
                   {"episodes": 500, "control_episodes": 50}, ex.rstdp),
        Experiment("false-belief", "L3", "Scripted false-belief task with and without theory of mind",
                   {"variant": "sally-anne", "with_tom": True}, ex.false_belief),
        Experiment("empathy", "L3", "Mirror-system emotion sharing, attribution and rescue decisions",
                   {}, ex.empathy),
        Experiment("hazard-warning", "L3", "Warn another agent of a hazard it cannot see",
                   {"trials": 40}, ex.hazard_warning),
    ]
}


def get_experiment(name: str) -> Experiment:
    if name not in REGISTRY:
        raise KeyError(f"unknown experiment {name!r}; registered: {', '.join(sorted(REGISTRY))}")
    return REGISTRY[name]


def list_experiments() -> list[dict]:
    """Alphabetical listing: name, level tag, one-line description."""
    return [{"name": e.name, "level": e.level, "description": e.description}
            for e in sorted(REGISTRY.values(), key=lambda e: e.name)]
