"""Speed generalisation of a conditioned avoidance response.

The agent drives along a multi-lane corridor (a :class:`GridWorld` whose
width is the track length and height the number of lanes).  An obstacle
ahead in the current lane within ``cue_range`` cells switches on the
proximity cue (the CS); running into it is the US.  The conditioning circuit
learns cue -> collision pairings at the training speed; afterwards its CR
(IPN population burst) triggers a lane change.

The cue is distance based, so its onset-to-collision interval shrinks as
speed grows: the learned association transfers as long as the CR latency
still fits inside that shorter interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..rng import as_generator, check_seed
from .conditioning import ConditioningCircuit, ConditioningConfig
from .gridworld import GridWorld


@dataclass(frozen=True)
class AvoidanceConfig:
    cue_range: int = 12
    step_ms: float = 25.0          # duration of one action
    onset_window: float = 10.0     # ms, sliding window for CR onset
    onset_spikes: int = 5          # IPN population spikes in the window that trigger a turn
    obstacle_gap: tuple[int, int] = (30, 45)  # spacing between obstacles (cells)
    train_episodes: int = 20
    eval_episodes: int = 20


def default_corridor() -> GridWorld:
    return GridWorld(width=160, height=2, start=(0, 0), goal=(159, 0), max_steps=10_000)


def _layout(env: GridWorld, cfg: AvoidanceConfig, rng) -> dict[int, int]:
    """Obstacle lane keyed by x position, spaced so one cue is active at a time."""
    lo, hi = cfg.obstacle_gap
    obstacles = {}
    x = cfg.cue_range + int(rng.integers(lo, hi + 1))
    while x < env.width - 1:
        obstacles[x] = int(rng.integers(env.height))
        x += int(rng.integers(lo, hi + 1))
    return obstacles


def cr_onset(result, cfg: AvoidanceConfig, dt: float) -> float | None:
    """First time (ms after CS onset) the IPN burst criterion is met, else None."""
    counts = result.ipn_per_step
    w = max(1, int(round(cfg.onset_window / dt)))
    csum = np.convolve(counts, np.ones(w, dtype=int), mode="full")[: counts.size]
    hit = np.flatnonzero(csum >= cfg.onset_spikes)
    return float(hit[0] + 1) * dt if hit.size else None


@dataclass
class EpisodeOutcome:
    success: bool
    collisions: int
    encounters: int
    pairings: list = field(default_factory=list)


def _drive(circuit: ConditioningCircuit, env: GridWorld, speed: float, cfg: AvoidanceConfig,
           rng, learn: bool, act: bool) -> EpisodeOutcome:
    """One pass down the corridor.

    Each obstacle encounter is one conditioning trial whose CS-US interval
    is the time to contact.  With ``act`` the CR steers the agent; with
    ``learn`` the trial updates the circuit.
    """
    obstacles = _layout(env, cfg, rng)
    lane = int(env.start[1])
    collisions = encounters = 0
    pairings = []
    for ox in sorted(obstacles):
        if obstacles[ox] != lane:
            continue
        encounters += 1
        # the cue switches on at the first action boundary within range
        k = math.ceil((ox - cfg.cue_range) / speed)
        x = k * speed
        d = ox - x
        interval = d / speed * cfg.step_ms
        hit_step = math.ceil(d / speed) - 1  # index of the action that would reach the obstacle
        res = circuit.trial(True, True, interval, learn=False, record=True) if not learn else None
        dodged = False
        if act:
            onset = cr_onset(res, cfg, circuit.cfg.dt)
            if onset is not None:
                turn_step = math.ceil(onset / cfg.step_ms)
                dodged = turn_step <= hit_step
        if learn:
            # training pass: the collision is the US paired with the cue
            res = circuit.trial(True, True, interval, learn=True)
            pairings.append(interval)
        if dodged:
            lane = (lane + 1) % env.height
        else:
            collisions += 1
    return EpisodeOutcome(collisions == 0, collisions, encounters, pairings)


def check_speed(speed: float, cue_range: int) -> float:
    if not math.isfinite(speed) or speed < 1:
        raise ValueError("speed must be >= 1")
    if speed >= cue_range:
        raise ValueError(
            f"speed {speed} covers the whole cue range ({cue_range} cells) in one action; "
            "obstacles would be passed without a cue"
        )
    return float(speed)


def speed_generalization(env: GridWorld | None = None, train_speed: float = 1.0,
                         test_speeds=(1.0, 3.5), seed: int = 0,
                         cfg: AvoidanceConfig | None = None,
                         circuit_cfg: ConditioningConfig | None = None) -> dict:
    """Train at ``train_speed`` then evaluate the frozen circuit at each test speed.

    Returns ``{"trained_success", "success": {speed: fraction}, "onset_ms": {...}}``.
    """
    cfg = cfg or AvoidanceConfig()
    env = env or default_corridor()
    seed = check_seed(seed)
    check_speed(train_speed, cfg.cue_range)
    speeds = [check_speed(s, cfg.cue_range) for s in test_speeds]
    circuit = ConditioningCircuit(cfg=circuit_cfg or ConditioningConfig(), seed=seed)
    train_rng = as_generator(seed, "corridor", "train")
    for _ in range(cfg.train_episodes):
        _drive(circuit, env, train_speed, cfg, train_rng, learn=True, act=False)

    def evaluate(speed: float) -> float:
        # layouts and circuit noise depend only on (seed, speed): the same
        # speed always scores the same, whatever else is evaluated
        rng = as_generator(seed, "corridor", "eval", repr(speed))
        circuit.reseed(as_generator(seed, "corridor", "circuit", repr(speed)))
        wins = [_drive(circuit, env, speed, cfg, rng, learn=False, act=True).success
                for _ in range(cfg.eval_episodes)]
        return float(np.mean(wins))

    trained = evaluate(float(train_speed))
    success = {s: evaluate(s) for s in speeds}
    return {"train_speed": float(train_speed), "trained_success": trained, "success": success}
