"""Motor-visual association for a planar two-joint arm.

Motor commands are population-coded by units with 2-D Gaussian tuning over
joint displacement.  Each unit's outgoing weights to the visual-prediction
population follow an outstar Hebbian rule, strengthened only when the unit
and the visual feedback are active in the same movement window.  The learned
weights are therefore the activity-weighted average of the feedback that
co-occurred with each unit, and the prediction for a command is the
activity-normalised readout of those weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..rng import as_generator

JOINT_LIMIT = 45.0  # degrees


@dataclass(frozen=True)
class MotorCommand:
    joint_deltas: tuple[float, float]
    timestamp: float = 0.0

    def __post_init__(self):
        deltas = tuple(float(d) for d in self.joint_deltas)
        if len(deltas) != 2:
            raise ValueError("the arm has two joints")
        if not all(math.isfinite(d) for d in deltas):
            raise ValueError("joint deltas must be finite")
        object.__setattr__(self, "joint_deltas", deltas)

    def within_limits(self, limit: float = JOINT_LIMIT) -> bool:
        return all(abs(d) <= limit for d in self.joint_deltas)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Time-stamped 2-D positions.  ``confidence`` is set on predictions."""

    times: np.ndarray
    positions: np.ndarray
    confidence: float = 1.0

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float).reshape(-1)
        pos = np.asarray(self.positions, dtype=float).reshape(-1, 2)
        if times.shape[0] != pos.shape[0]:
            raise ValueError("times and positions must have equal length")
        if times.size > 1 and np.any(np.diff(times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "positions", pos)

    def __len__(self) -> int:
        return int(self.times.size)

    @property
    def low_confidence(self) -> bool:
        return self.confidence < 0.5

    def displacement(self) -> np.ndarray:
        return self.positions - self.positions[0]

    def reversed(self) -> "Trajectory":
        return Trajectory(self.times, self.positions[::-1].copy(), self.confidence)

    def concat(self, other: "Trajectory") -> "Trajectory":
        shift = self.times[-1] - other.times[0] + (self.times[-1] - self.times[-2] if len(self) > 1 else 1.0)
        return Trajectory(np.concatenate([self.times, other.times + shift]),
                          np.vstack([self.positions, other.positions]))


@dataclass(frozen=True)
class PlanarArm:
    lengths: tuple[float, float] = (1.0, 0.8)
    home: tuple[float, float] = (30.0, 60.0)
    samples: int = 10
    sample_dt: float = 10.0  # ms between visual samples
    mirrored: bool = True    # seen through a mirror: x flips sign

    def end_effector(self, angles_deg) -> np.ndarray:
        a = np.radians(np.asarray(angles_deg, dtype=float))
        l1, l2 = self.lengths
        x = l1 * np.cos(a[..., 0]) + l2 * np.cos(a[..., 0] + a[..., 1])
        y = l1 * np.sin(a[..., 0]) + l2 * np.sin(a[..., 0] + a[..., 1])
        pos = np.stack([x, y], axis=-1)
        if self.mirrored:
            pos[..., 0] = -pos[..., 0]
        return pos

    def execute(self, cmd: MotorCommand) -> Trajectory:
        """Move from the home posture through ``cmd`` and return the seen end-effector path."""
        frac = np.arange(self.samples + 1) / self.samples
        angles = np.asarray(self.home) + frac[:, None] * np.asarray(cmd.joint_deltas)
        times = cmd.timestamp + frac * self.samples * self.sample_dt
        return Trajectory(times, self.end_effector(angles))


def random_command(rng, limit: float = JOINT_LIMIT, timestamp: float = 0.0) -> MotorCommand:
    return MotorCommand(tuple(rng.uniform(-limit, limit, size=2)), timestamp)


@dataclass
class MotorPopulation:
    """Units tuned to joint displacement on a regular 2-D grid.

    Activity is gated by command magnitude, so a null command leaves the
    population silent.
    """

    grid_points: int = 11
    limit: float = JOINT_LIMIT
    sigma: float = 7.0

    def __post_init__(self):
        axis = np.linspace(-self.limit, self.limit, self.grid_points)
        g1, g2 = np.meshgrid(axis, axis, indexing="ij")
        self.centers = np.stack([g1.ravel(), g2.ravel()], axis=1)
        node = self.encode(MotorCommand((axis[1], axis[1])))
        self.reference_activity = float(node.sum())

    @property
    def size(self) -> int:
        return self.centers.shape[0]

    def encode(self, cmd: MotorCommand) -> np.ndarray:
        d = np.asarray(cmd.joint_deltas)
        sq = np.sum((self.centers - d) ** 2, axis=1)
        gate = min(1.0, float(np.linalg.norm(d)) / self.sigma)
        return gate * np.exp(-sq / (2 * self.sigma**2))


@dataclass
class AssociationMap:
    motor: MotorPopulation
    weights: np.ndarray            # (motor units, samples * 2) predicted displacements
    usage: np.ndarray              # cumulative activity per motor unit
    times: np.ndarray              # relative sample times of a movement
    w_clip: float = 5.0
    trained: bool = False
    epochs_seen: int = 0
    reliability_gain: float = 5.0  # per-epoch activity at which a unit is ~fully trusted
    epoch_errors: list[float] = field(default_factory=list)

    @classmethod
    def empty(cls, arm: PlanarArm, motor: MotorPopulation | None = None) -> "AssociationMap":
        motor = motor or MotorPopulation()
        n_feat = (arm.samples + 1) * 2
        times = np.arange(arm.samples + 1) * arm.sample_dt
        return cls(motor, np.zeros((motor.size, n_feat)), np.zeros(motor.size), times)

    def unit_confidence(self) -> np.ndarray:
        if not self.epochs_seen:
            return np.zeros_like(self.usage)
        return 1.0 - np.exp(-self.reliability_gain * self.usage / self.epochs_seen)


def _hebbian_epoch(amap: AssociationMap, codes, feedback) -> None:
    for m, v in zip(codes, feedback):
        amap.usage += m
        # outstar with rate m_j / (accumulated activity of j): weights track the
        # activity-weighted mean of co-occurring feedback
        rate = np.divide(m, amap.usage, out=np.zeros_like(m), where=amap.usage > 0)
        amap.weights += rate[:, None] * (v[None, :] - amap.weights)
    np.clip(amap.weights, -amap.w_clip, amap.w_clip, out=amap.weights)
    amap.epochs_seen += 1


def _readout(amap: AssociationMap, m: np.ndarray) -> np.ndarray:
    return (m @ amap.weights) / (m.sum() + 1e-3)


def learn_motor_visual(episodes, arm: PlanarArm | None = None, epochs: int = 5,
                       holdout=None, motor: MotorPopulation | None = None) -> AssociationMap:
    """Associate commands with the visual feedback they produced.

    ``episodes`` is a list of ``(MotorCommand, Trajectory)``.  When ``holdout``
    episodes are given, the mean prediction error on them is recorded before
    training and after every epoch in ``map.epoch_errors``.
    """
    episodes = list(episodes)
    if not episodes:
        raise ValueError("learn_motor_visual needs at least one episode")
    arm = arm or PlanarArm()
    amap = AssociationMap.empty(arm, motor)
    codes = [amap.motor.encode(cmd) for cmd, _ in episodes]
    feedback = []
    for _, traj in episodes:
        if len(traj) != amap.times.size:
            raise ValueError("trajectory length does not match the arm's sampling")
        feedback.append(traj.displacement().reshape(-1))
    if holdout:
        amap.epoch_errors.append(_untrained_error(amap, holdout))
    for _ in range(epochs):
        _hebbian_epoch(amap, codes, feedback)
        if holdout:
            amap.trained = True
            amap.epoch_errors.append(prediction_error(amap, holdout))
    amap.trained = True
    return amap


def _untrained_error(amap: AssociationMap, episodes) -> float:
    # an empty map predicts no movement at all
    return float(np.mean([np.sqrt(np.mean(t.displacement() ** 2)) for _, t in episodes]))


def predict_trajectory(amap: AssociationMap, cmd: MotorCommand) -> Trajectory:
    """Expected visual displacement for ``cmd`` (starting at the origin)."""
    if not amap.trained:
        raise ValueError("association map is untrained")
    times = cmd.timestamp + amap.times
    if not any(cmd.joint_deltas):
        return Trajectory(times, np.zeros((times.size, 2)), confidence=1.0)
    m = amap.motor.encode(cmd)
    disp = _readout(amap, m).reshape(-1, 2)
    total = float(m.sum())
    support = float(m @ amap.unit_confidence()) / max(total, 1e-12)
    coverage = min(1.0, total / amap.motor.reference_activity)
    return Trajectory(times, disp, confidence=support * coverage)


def prediction_error(amap: AssociationMap, episodes) -> float:
    """Mean RMS displacement error over ``(command, trajectory)`` episodes."""
    errs = []
    for cmd, traj in episodes:
        pred = predict_trajectory(amap, cmd).positions
        errs.append(float(np.sqrt(np.mean((pred - traj.displacement()) ** 2))))
    return float(np.mean(errs))


def babble(arm: PlanarArm, n: int, seed=0) -> list[tuple[MotorCommand, Trajectory]]:
    """Random self-generated movements and the feedback they produce."""
    rng = as_generator(seed, "babble")
    out = []
    for _ in range(n):
        cmd = random_command(rng)
        out.append((cmd, arm.execute(cmd)))
    return out


def trajectory_score(predicted: Trajectory, observed: Trajectory) -> float:
    """Pearson correlation of the concatenated x/y displacement series.

    ``observed`` is resampled onto ``predicted``'s time base over the
    overlapping range; displacement is taken from the first overlapping sample.
    """
    if len(predicted) < 2 or len(observed) < 2:
        raise ValueError("degenerate trajectory")
    lo = max(predicted.times[0], observed.times[0])
    hi = min(predicted.times[-1], observed.times[-1])
    mask = (predicted.times >= lo - 1e-9) & (predicted.times <= hi + 1e-9)
    if mask.sum() < 2:
        raise ValueError("trajectories do not overlap in time")
    t = predicted.times[mask]
    p = predicted.positions[mask]
    o = np.stack([np.interp(t, observed.times, observed.positions[:, k]) for k in range(2)], axis=1)
    a = (p - p[0]).reshape(-1, order="F")
    b = (o - o[0]).reshape(-1, order="F")
    sa, sb = a.std(), b.std()
    if sa == 0 or sb == 0:
        raise ValueError("degenerate trajectory")
    return float(np.mean((a - a.mean()) * (b - b.mean())) / (sa * sb))


def classify_self_world(predicted: Trajectory, observed: Trajectory, threshold: float = 0.8) -> str:
    """``"self"`` when observed motion matches the expected feedback, else ``"other"``."""
    return "self" if trajectory_score(predicted, observed) >= threshold else "other"
