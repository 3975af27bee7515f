"""Mirror-neuron affective empathy and the altruistic rescue rule.

Three population groups take part: emotion (one pool per valence-coded
emotion), perception (one pool per overt action) and motor, which holds
mirror pools (one per action) plus a pool of anti-mirror neurons.  Own
experience episodes co-activate the executed action's motor pool, the
perception of that action and the felt emotion; Hebbian learning then
links perception to mirror pools and mirror pools to emotions.  Observing
someone else's action later reaches the same emotion pool through those
links.  Anti-mirror neurons are driven by the proprioceptive copy of one's
own movement, so their activity tells self-generated from observed actions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core.neuron import NeuronParams, lif_update
from ..core.selection import wta_select
from ..core.spikes import encode_poisson
from ..rng import as_generator, check_seed

EMOTIONS = ("neutral", "positive", "distress")
VALENCE = {"neutral": 0.0, "positive": 1.0, "distress": -1.0}


@dataclass(frozen=True)
class EmotionState:
    label: str
    valence: float
    intensity: float = 1.0

    def __post_init__(self):
        if self.label not in VALENCE:
            raise ValueError(f"emotion must be one of {EMOTIONS}")
        if not -1.0 <= self.valence <= 1.0:
            raise ValueError("valence must lie in [-1, 1]")
        if not 0.0 <= self.intensity <= 1.0:
            raise ValueError("intensity must lie in [0, 1]")

    @classmethod
    def of(cls, label: str, intensity: float = 1.0) -> "EmotionState":
        return cls(label, VALENCE[label], intensity)

    @property
    def negative_valence(self) -> float:
        return max(0.0, -self.valence) * self.intensity


@dataclass(frozen=True)
class MirrorConfig:
    pool: int = 8                  # neurons per pool
    n_anti: int = 8
    window: float = 50.0           # ms per episode / observation
    rate: float = 200.0            # Hz of driven pools
    drive_weight: float = 0.6      # external spike -> driven pool jump
    lr: float = 0.01
    w_max: float = 0.3
    copy_current: float = 1.5      # proprioceptive copy onto anti-mirror neurons
    anti_threshold: int = 5        # anti-mirror spikes that signal "self"
    emotion_threshold: int = 3     # emotion spikes needed to leave neutral
    neuron: NeuronParams = field(default_factory=lambda: NeuronParams(t_refractory=2.0))


class MirrorSystem:
    """Perception -> mirror -> emotion pathway with an anti-mirror attribution pool."""

    def __init__(self, actions, cfg: MirrorConfig | None = None, seed: int = 0):
        self.actions = tuple(actions)
        if len(set(self.actions)) != len(self.actions) or not self.actions:
            raise ValueError("actions must be unique and non-empty")
        self.cfg = cfg or MirrorConfig()
        self.seed = check_seed(seed)
        n_act, p = len(self.actions), self.cfg.pool
        self.w_perc_mirror = np.zeros((n_act * p, n_act * p))
        self.w_mirror_emotion = np.zeros((n_act * p, len(EMOTIONS) * p))
        self.trained_pairs: dict[str, str] = {}

    @property
    def trained(self) -> bool:
        return bool(self.trained_pairs)

    def _pool(self, index: int) -> slice:
        p = self.cfg.pool
        return slice(index * p, (index + 1) * p)

    def _drive(self, n_pools: int, index: int | None, key) -> np.ndarray:
        """Poisson raster (steps, neurons) driving pool ``index`` (or nothing)."""
        c = self.cfg
        rates = np.zeros(n_pools * c.pool)
        if index is not None:
            rates[self._pool(index)] = c.rate
        train = encode_poisson(rates, c.window, seed=as_generator(self.seed, "mirror", *key))
        return train.raster(1.0)

    def _run(self, action: int | None, motor: bool, emotion: int | None, copy: bool, key) -> dict:
        """Simulate one window; returns spike counts per population."""
        c = self.cfg
        n_act = len(self.actions)
        perc_in = self._drive(n_act, action, key + ("perception",))
        motor_in = self._drive(n_act, action if motor else None, key + ("motor",))
        emo_in = self._drive(len(EMOTIONS), emotion, key + ("emotion",))
        steps = perc_in.shape[0]
        pops = {"perception": n_act * c.pool, "mirror": n_act * c.pool,
                "emotion": len(EMOTIONS) * c.pool, "anti": c.n_anti}
        v = {k: np.zeros(n) for k, n in pops.items()}
        ref = {k: np.zeros(n) for k, n in pops.items()}
        counts = {k: np.zeros(n, dtype=np.int64) for k, n in pops.items()}
        prev = {k: np.zeros(n) for k, n in pops.items()}
        copy_current = np.full(c.n_anti, c.copy_current if copy else 0.0)
        for t in range(steps):
            jumps = {
                "perception": c.drive_weight * perc_in[t],
                "mirror": c.drive_weight * motor_in[t] + prev["perception"] @ self.w_perc_mirror,
                "emotion": c.drive_weight * emo_in[t] + prev["mirror"] @ self.w_mirror_emotion,
                "anti": np.zeros(c.n_anti),
            }
            spikes = {}
            for k in pops:
                cur = copy_current if k == "anti" else 0.0
                v[k], ref[k], s = lif_update(v[k], ref[k], c.neuron, cur, 1.0, jump=jumps[k])
                spikes[k] = s.astype(float)
                counts[k] += s
            prev = spikes
        return counts

    def experience(self, action: str, emotion: str, repeats: int = 5) -> None:
        """Own episodes: execute ``action`` while feeling ``emotion``; Hebbian update."""
        a, e = self.actions.index(action), EMOTIONS.index(emotion)
        c = self.cfg
        for r in range(repeats):
            counts = self._run(a, True, e, True, ("experience", action, emotion, r))
            # rate-based Hebbian co-activation over the episode window
            pc, mc, ec = (counts[k].astype(float) for k in ("perception", "mirror", "emotion"))
            self.w_perc_mirror = np.clip(self.w_perc_mirror + c.lr * np.outer(pc, mc), 0, c.w_max)
            self.w_mirror_emotion = np.clip(self.w_mirror_emotion + c.lr * np.outer(mc, ec), 0, c.w_max)
        self.trained_pairs[action] = emotion

    def emotion_counts(self, counts: dict) -> np.ndarray:
        return counts["emotion"].reshape(len(EMOTIONS), self.cfg.pool).sum(axis=1)

    def read_emotion(self, counts: dict) -> EmotionState:
        pools = self.emotion_counts(counts)
        if pools.max() < self.cfg.emotion_threshold:
            return EmotionState.of("neutral", 0.0)
        label = EMOTIONS[wta_select(pools)]
        intensity = float(min(1.0, pools.max() / (self.cfg.pool * self.cfg.rate * self.cfg.window / 1000.0)))
        return EmotionState.of(label, intensity)

    def self_experience(self, action: str, trial: int = 0) -> dict:
        """Counts when the agent itself performs ``action`` (no emotion drive)."""
        return self._run(self.actions.index(action), True, None, True, ("self", action, trial))

    def observe(self, action: str, proprioceptive_copy: bool, trial: int = 0) -> dict:
        """Counts when ``action`` is only seen (plus the copy if it is one's own)."""
        return self._run(self.actions.index(action), False, None, proprioceptive_copy,
                         ("observe", action, proprioceptive_copy, trial))


def observe_action_empathy(mirror: MirrorSystem, observed_action: str, proprioceptive_copy: bool,
                           trial: int = 0) -> tuple[EmotionState, str]:
    """Shared emotion evoked by seeing ``observed_action`` and who it is attributed to."""
    if not mirror.trained:
        raise ValueError("mirror system has no self-experience yet")
    if observed_action not in mirror.actions:
        raise ValueError(f"unknown action {observed_action!r}")
    counts = mirror.observe(observed_action, proprioceptive_copy, trial)
    attribution = "self" if counts["anti"].sum() >= mirror.cfg.anti_threshold else "other"
    return mirror.read_emotion(counts), attribution


def decide_altruistic(own_task_value: float, other_emotion: EmotionState, empathy_gain: float) -> str:
    """``"rescue"`` iff ``empathy_gain * negative_valence > own_task_value``."""
    if not empathy_gain >= 0:
        raise ValueError("empathy_gain must be >= 0")
    return "rescue" if empathy_gain * other_emotion.negative_valence > own_task_value else "continue-task"


def train_mirror_system(pairs: dict[str, str], extra_actions=(), seed: int = 0,
                        cfg: MirrorConfig | None = None, repeats: int = 5) -> MirrorSystem:
    """Build a system over ``pairs`` (action -> emotion) plus untrained ``extra_actions``."""
    mirror = MirrorSystem(list(pairs) + list(extra_actions), cfg, seed)
    for action, emotion in pairs.items():
        mirror.experience(action, emotion, repeats)
    return mirror
