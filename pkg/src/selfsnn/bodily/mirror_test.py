"""Multi-agent mirror self-recognition."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..rng import substream
from .motor_visual import (
    AssociationMap,
    MotorCommand,
    PlanarArm,
    Trajectory,
    babble,
    learn_motor_visual,
    predict_trajectory,
    random_command,
    trajectory_score,
)

TRIAL_CSV_HEADER = ("trial", "agent", "claimed_index", "true_index", "score")


@dataclass
class MirrorTestResult:
    accuracy: float
    ambiguous_rate: float
    decisions: int
    ambiguous: int
    rows: list[tuple[int, int, int, int, float]] = field(default_factory=list)

    def summary(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "ambiguous_rate": self.ambiguous_rate,
            "decisions": self.decisions,
            "ambiguous": self.ambiguous,
        }


def _sequence(arm: PlanarArm, commands: list[MotorCommand]) -> Trajectory:
    traj = arm.execute(commands[0])
    for cmd in commands[1:]:
        nxt = arm.execute(cmd)
        # gestures start from home; chain them as displacements from the first start
        nxt = Trajectory(nxt.times, nxt.positions - nxt.positions[0] + traj.positions[0])
        traj = traj.concat(nxt)
    return traj


def _predicted_sequence(amap: AssociationMap, commands: list[MotorCommand]) -> Trajectory:
    traj = predict_trajectory(amap, commands[0])
    for cmd in commands[1:]:
        traj = traj.concat(predict_trajectory(amap, cmd))
    return traj


def run_mirror_test(n_agents: int = 3, trials: int = 100, seed=0, noise: float = 0.02,
                    gestures: int = 4, babble_episodes: int = 300, ambiguity_gap: float = 0.05,
                    shared_commands: bool = False) -> MirrorTestResult:
    """Identical agents move at random in front of mirrors; each claims the reflection it predicts best.

    Every agent first learns its motor-visual map by babbling in front of a
    mirror.  In each trial all agents perform independent random gesture
    sequences; every agent scores all reflections (shuffled, unlabeled)
    against its own predicted feedback and claims the best.  Decisions whose
    top-two score gap is below ``ambiguity_gap`` are counted as ambiguous and
    excluded from the accuracy.  ``shared_commands`` forces every agent to
    issue the same commands (indistinguishable by construction).
    """
    if n_agents < 1:
        raise ValueError("need at least one agent")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    arm = PlanarArm()
    maps = [learn_motor_visual(babble(arm, babble_episodes, substream(seed, "babble", a)), arm)
            for a in range(n_agents)]
    rows = []
    correct = decided = ambiguous = 0
    for trial in range(trials):
        rng = substream(seed, "mirror-trial", trial)
        if shared_commands:
            common = [random_command(rng) for _ in range(gestures)]
            commands = [list(common) for _ in range(n_agents)]
        else:
            commands = [[random_command(rng) for _ in range(gestures)] for _ in range(n_agents)]
        observed = []
        scale = 0.0
        for a in range(n_agents):
            traj = _sequence(arm, commands[a])
            scale = max(scale, float(np.abs(traj.displacement()).max()))
            observed.append(traj)
        observed = [
            Trajectory(t.times, t.positions + rng.normal(0.0, noise, t.positions.shape)) for t in observed
        ]
        order = rng.permutation(n_agents)  # position k in the scene shows agent order[k]
        scene = [observed[i] for i in order]
        for a in range(n_agents):
            pred = _predicted_sequence(maps[a], commands[a])
            scores = np.array([trajectory_score(pred, obs) for obs in scene])
            claimed = int(np.argmax(scores))
            true_index = int(np.flatnonzero(order == a)[0])
            rows.append((trial, a, claimed, true_index, float(scores[claimed])))
            if n_agents > 1:
                top2 = np.sort(scores)[-2:]
                if top2[1] - top2[0] < ambiguity_gap:
                    ambiguous += 1
                    continue
            decided += 1
            correct += claimed == true_index
    total = trials * n_agents
    return MirrorTestResult(
        accuracy=correct / decided if decided else float("nan"),
        ambiguous_rate=ambiguous / total,
        decisions=decided,
        ambiguous=ambiguous,
        rows=rows,
    )
