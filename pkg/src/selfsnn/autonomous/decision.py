"""Reward-modulated spiking decision making on a grid.

The policy is a three-stage loop: one-hot Poisson place cells ("prefrontal")
project through R-STDP tagged synapses onto a striatal LIF layer split into
one group per action; the premotor readout sums each group's spikes over a
decision window and a winner-takes-all picks the action.  After selection a
short commit phase drives the chosen group (thalamic feedback) so the
synapses that produced the executed action carry eligibility whether the
action was chosen greedily or by exploration.  Dopamine is the reward
minus a running-average baseline.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from ..core.neuron import NeuronParams, lif_update
from ..core.selection import wta_select
from ..plasticity.reward import DopamineBaseline, EligibilityTrace, rstdp_apply, update_eligibility
from ..plasticity.stdp import StdpParams
from ..rng import as_generator, check_seed
from .gridworld import MOVES, GridWorld


@dataclass(frozen=True)
class PolicyConfig:
    group_size: int = 10
    window: float = 20.0          # ms decision window
    commit: float = 10.0          # ms of feedback drive to the chosen group
    dt: float = 1.0
    place_rate: float = 300.0     # Hz, active place cell
    tau_syn: float = 5.0
    input_gain: float = 1.0
    bias: float = 0.5
    noise: float = 0.5            # std of the striatal noise current
    commit_drive: float = 1.0
    commit_inhibition: float = 1.0  # lateral inhibition of the losing groups during commit
    w_init: float = 0.3
    w_jitter: float = 0.05
    w_min: float = 0.0
    w_max: float = 1.0
    tau_e: float = 200.0
    trace_cap: float = 0.1        # replacing-trace bound: repeats do not stack credit
    lr: float = 0.5
    baseline_rate: float = 0.01
    homeostasis: bool = True      # keep each place cell's mean outgoing weight at w_init
    stdp: StdpParams = field(default_factory=StdpParams)
    neuron: NeuronParams = field(default_factory=NeuronParams)

    def __post_init__(self):
        if self.group_size < 1:
            raise ValueError("group_size must be >= 1")
        if not (self.window > 0 and self.dt > 0 and self.commit >= 0):
            raise ValueError("window and dt must be > 0, commit >= 0")


class PolicyNetwork:
    """Place cells -> striatum (R-STDP) -> premotor WTA."""

    def __init__(self, n_states: int, n_actions: int = len(MOVES), cfg: PolicyConfig | None = None, seed: int = 0):
        self.cfg = cfg or PolicyConfig()
        self.n_states = int(n_states)
        self.n_actions = int(n_actions)
        if self.n_states < 1 or self.n_actions < 1:
            raise ValueError("need at least one state and one action")
        c = self.cfg
        rng = as_generator(check_seed(seed), "policy", "init")
        n_str = self.n_actions * c.group_size
        self.weights = np.clip(c.w_init + c.w_jitter * rng.standard_normal((self.n_states, n_str)),
                               c.w_min, c.w_max)
        self.group = np.repeat(np.arange(self.n_actions), c.group_size)
        self.baseline = DopamineBaseline(c.baseline_rate)
        self.trace = EligibilityTrace.zeros(self.n_states, n_str, c.tau_e)

    @property
    def n_striatal(self) -> int:
        return self.weights.shape[1]

    def reset_trace(self) -> None:
        self.trace = EligibilityTrace.zeros(self.n_states, self.n_striatal, self.cfg.tau_e)

    def apply_dopamine(self, rpe: float) -> None:
        c = self.cfg
        w = rstdp_apply(self.weights, self.trace, rpe, c.lr, c.w_min, c.w_max)
        if c.homeostasis:
            # subtractive scaling: actions compete for a fixed synaptic budget per state
            w = np.clip(w - (w.mean(axis=1, keepdims=True) - c.w_init), c.w_min, c.w_max)
        self.weights = w

    def run_window(self, state: int, rng, chosen: int | None = None, duration: float | None = None,
                   learn: bool = False) -> np.ndarray:
        """Simulate place cell ``state`` driving the striatum; returns per-action spike counts.

        With ``chosen`` set the commit drive goes to that action's group.
        With ``learn`` the eligibility trace follows the pre/post spikes.
        """
        c = self.cfg
        steps = int(round((c.window if duration is None else duration) / c.dt))
        p_spike = c.place_rate * c.dt / 1000.0
        syn_decay = math.exp(-c.dt / c.tau_syn)
        drive = np.full(self.n_striatal, c.bias)
        if chosen is not None:
            won = self.group == chosen
            drive = drive + np.where(won, c.commit_drive, -c.commit_inhibition)
        v = np.zeros(self.n_striatal)
        ref = np.zeros(self.n_striatal)
        syn = 0.0
        counts = np.zeros(self.n_actions, dtype=int)
        w_row = self.weights[state]
        pre = np.zeros(self.n_states)
        for _ in range(steps):
            fired = rng.random() < p_spike
            syn = syn * syn_decay + (1.0 if fired else 0.0)
            current = drive + c.input_gain * syn * w_row + c.noise * rng.standard_normal(self.n_striatal)
            v, ref, spiked = lif_update(v, ref, c.neuron, current, c.dt)
            if spiked.any():
                np.add.at(counts, self.group[spiked], 1)
            if learn:
                pre[state] = 1.0 if fired else 0.0
                self.trace = update_eligibility(self.trace, pre, spiked, c.stdp, c.dt)
        return counts


def dm_decide(policy: PolicyNetwork, state: int, explore_eps: float, rng, learn: bool = False) -> int:
    """One decision: exploration draw, else WTA over the decision-window counts."""
    if not 0 <= state < policy.n_states:
        raise ValueError(f"state {state} outside 0..{policy.n_states - 1}")
    if not 0.0 <= explore_eps <= 1.0:
        raise ValueError("explore_eps must lie in [0, 1]")
    if rng.random() < explore_eps:
        action = int(rng.integers(policy.n_actions))
    else:
        action = wta_select(policy.run_window(state, rng), "random", rng)
    if learn:
        # the decision window only ages the trace; tagging happens while the
        # chosen group is driven
        c = policy.cfg
        silent = np.zeros(policy.n_states), np.zeros(policy.n_striatal)
        policy.trace = update_eligibility(policy.trace, *silent, c.stdp, c.window)
        policy.run_window(state, rng, chosen=action, duration=c.commit, learn=True)
        if math.isfinite(c.trace_cap):
            capped = np.clip(policy.trace.values, -c.trace_cap, c.trace_cap)
            policy.trace = replace(policy.trace, values=capped)
    return action


def dm_select_action(policy: PolicyNetwork, state: int, explore_eps: float = 0.0, seed: int = 0) -> int:
    """Select an action without plasticity; deterministic given ``(policy, state, seed)``."""
    return dm_decide(policy, state, explore_eps, as_generator(check_seed(seed), "select", state))


# ----------------------------------------------------------------------
# experience


@dataclass(frozen=True)
class ExperienceRecord:
    state: int
    action: int
    reward: float
    next_state: int
    emotion: str | None = None
    timestamp: int = 0
    outcome: str | None = None   # "goal", "hazard" or "truncated" on the last step

    def __post_init__(self):
        if self.action not in MOVES:
            raise ValueError(f"action must be one of {sorted(MOVES)}")
        if not math.isfinite(self.reward):
            raise ValueError("reward must be finite")


class ExperienceBuffer:
    """FIFO ring of :class:`ExperienceRecord`."""

    def __init__(self, capacity: int = 1000):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = int(capacity)
        self._items: deque[ExperienceRecord] = deque(maxlen=self.capacity)

    def __len__(self) -> int:
        return len(self._items)

    def __iter__(self):
        return iter(self._items)


def record_experience(buffer: ExperienceBuffer, rec: ExperienceRecord) -> None:
    buffer._items.append(rec)


def query_experience(buffer: ExperienceBuffer, predicate) -> list[ExperienceRecord]:
    """Records whose state matches, newest first.

    ``predicate`` is a callable on the record's state or a state to match exactly.
    """
    test: Callable = predicate if callable(predicate) else (lambda s: s == predicate)
    return [r for r in reversed(buffer._items) if test(r.state)]


# ----------------------------------------------------------------------
# training


def dm_train_episode(policy: PolicyNetwork, env: GridWorld, explore_eps: float = 0.05,
                     rng=None, clock: int = 0) -> tuple[PolicyNetwork, float, list[ExperienceRecord]]:
    """Run one episode with R-STDP updates after every step.

    The episode stops at the goal, a hazard, or ``env.max_steps`` (the last
    record's ``outcome`` is then ``"truncated"``).
    """
    rng = as_generator(rng, "episode")
    c = policy.cfg
    state = env.reset()
    policy.reset_trace()
    records = []
    ret = 0.0
    done = False
    while not done:
        action = dm_decide(policy, state, explore_eps, rng, learn=True)
        nxt, reward, done, info = env.step(action)
        rpe = policy.baseline.rpe(reward)
        if rpe != 0.0:
            policy.apply_dopamine(rpe)
        outcome = None
        if info["reached_goal"]:
            outcome = "goal"
        elif info["hazard"]:
            outcome = "hazard"
        elif info["truncated"]:
            outcome = "truncated"
        records.append(ExperienceRecord(state, action, float(reward), nxt, timestamp=clock + len(records),
                                        outcome=outcome))
        ret += reward
        state = nxt
    return policy, ret, records


@dataclass
class TrainingRun:
    policy: PolicyNetwork
    rows: list[dict]               # episode, return, steps, success
    buffer: ExperienceBuffer

    def success(self) -> np.ndarray:
        return np.array([r["success"] for r in self.rows], dtype=bool)

    def returns(self) -> np.ndarray:
        return np.array([r["return"] for r in self.rows])

    def goal_rate(self, last: int = 100) -> float:
        return float(self.success()[-last:].mean())


def explore_schedule(episode: int, episodes: int, start: float = 0.2, end: float = 0.02) -> float:
    """Linear decay over the first half of training, then constant."""
    frac = min(1.0, episode / max(1.0, 0.5 * episodes))
    return start + (end - start) * frac


def train_policy(env: GridWorld | None = None, episodes: int = 500, seed: int = 0,
                 cfg: PolicyConfig | None = None, policy: PolicyNetwork | None = None,
                 buffer_capacity: int = 5000, eps_start: float = 0.2, eps_end: float = 0.02) -> TrainingRun:
    env = env or GridWorld()
    seed = check_seed(seed)
    policy = policy or PolicyNetwork(env.n_states, cfg=cfg, seed=seed)
    buffer = ExperienceBuffer(buffer_capacity)
    rows = []
    clock = 0
    for ep in range(episodes):
        eps = explore_schedule(ep, episodes, eps_start, eps_end)
        rng = as_generator(seed, "train", ep)
        _, ret, records = dm_train_episode(policy, env, eps, rng, clock)
        clock += len(records)
        for rec in records:
            record_experience(buffer, rec)
        rows.append({"episode": ep, "return": ret, "steps": len(records),
                     "success": records[-1].outcome == "goal"})
    return TrainingRun(policy, rows, buffer)


def reward_flipped(env: GridWorld) -> GridWorld:
    """Swap the rewarded goal and the single hazard: the reward sign at both cells flips."""
    if len(env.hazards) != 1:
        raise ValueError("reward flip needs exactly one hazard cell")
    (hazard,) = env.hazards
    return replace(env, goal=hazard, hazards=frozenset({env.goal}))


def zero_reward(env: GridWorld) -> GridWorld:
    return replace(env, step_reward=0.0, goal_reward=0.0, collision_penalty=0.0, hazard_penalty=0.0,
                   timeout_penalty=0.0)
