"""Pair-based STDP and the adaptive unsupervised layer rule."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np


@dataclass(frozen=True)
class StdpParams:
    a_plus: float = 0.1
    a_minus: float = 0.12
    tau_plus: float = 20.0
    tau_minus: float = 20.0
    w_min: float = 0.0
    w_max: float = 1.0

    def __post_init__(self):
        if not (self.tau_plus > 0 and self.tau_minus > 0):
            raise ValueError("STDP time constants must be > 0")
        if not self.w_min <= self.w_max:
            raise ValueError("w_min must not exceed w_max")


def stdp_delta(delta_t, params: StdpParams):
    """Weight change for a spike pair separated by ``delta_t = t_post - t_pre`` (ms).

    Works elementwise on arrays.
    """
    dt = np.asarray(delta_t, dtype=float)
    if not np.all(np.isfinite(dt)):
        raise ValueError("delta_t must be finite")
    ltp = params.a_plus * np.exp(-np.abs(dt) / params.tau_plus)
    ltd = -params.a_minus * np.exp(-np.abs(dt) / params.tau_minus)
    out = np.where(dt > 0, ltp, np.where(dt < 0, ltd, 0.0))
    return float(out) if out.ndim == 0 else out


class OnlineStdp:
    """Trace-based pair STDP usable as a :func:`selfsnn.core.simulate` learning rule.

    Same-step pairs count as ``delta_t = 0`` and leave the weight unchanged.
    """

    def __init__(self, params: StdpParams):
        self.params = params
        self.pre_trace: np.ndarray | None = None
        self.post_trace: np.ndarray | None = None

    def __call__(self, weights, pre, post, dt):
        p = self.params
        if self.pre_trace is None:
            self.pre_trace = np.zeros(weights.shape[0])
            self.post_trace = np.zeros(weights.shape[1])
        self.pre_trace *= math.exp(-dt / p.tau_plus)
        self.post_trace *= math.exp(-dt / p.tau_minus)
        if post.any():
            weights += p.a_plus * np.outer(self.pre_trace, post)
        if pre.any():
            weights -= p.a_minus * np.outer(pre, self.post_trace)
        np.clip(weights, p.w_min, p.w_max, out=weights)
        self.pre_trace += pre
        self.post_trace += post


@dataclass(frozen=True)
class AdaptiveStdpConfig:
    tau_filter: float = 5.0          # synaptic low-pass of input current (ms)
    tau_m: float = 20.0
    v_threshold: float = 1.0
    input_gain: float = 2.0
    lr: float = 0.01                 # weight learning rate on postsynaptic spikes
    a_minus: float = 0.0005          # depression on presynaptic spikes (post trace)
    tau_post: float = 20.0
    target_rate: float = 5.0         # Hz, per neuron
    threshold_lr: float = 0.02
    lateral_lr: float = 0.001
    lateral_max: float = 2.0         # strongest allowed inhibition (magnitude)
    winners: int = 1                 # how many responders may fire per step
    w_min: float = 0.0
    w_max: float = 1.0


@dataclass(frozen=True)
class AdaptiveStdpState:
    """State of one competitive layer.

    ``synaptic_filter_state`` is the low-passed input current per input line,
    ``lateral_inhibition_weights`` the (non-positive) within-layer matrix,
    ``threshold_offsets`` the non-negative adaptive thresholds.
    """

    synaptic_filter_state: np.ndarray
    lateral_inhibition_weights: np.ndarray
    threshold_offsets: np.ndarray
    v: np.ndarray
    post_trace: np.ndarray
    last_spikes: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))

    @classmethod
    def initial(cls, n_in: int, n_out: int, lateral_init: float = 2.0) -> "AdaptiveStdpState":
        lateral = -lateral_init * (1.0 - np.eye(n_out))
        return cls(
            synaptic_filter_state=np.zeros(n_in),
            lateral_inhibition_weights=lateral,
            threshold_offsets=np.zeros(n_out),
            v=np.zeros(n_out),
            post_trace=np.zeros(n_out),
            last_spikes=np.zeros(n_out, dtype=bool),
        )


def apply_adaptive_stdp(input_spikes, weights, state: AdaptiveStdpState,
                        cfg: AdaptiveStdpConfig = AdaptiveStdpConfig(), dt: float = 1.0):
    """Advance a competitive STDP layer by one step.

    1. Input spikes are low-pass filtered per line before they drive the layer.
    2. Neurons integrate the filtered current; of those above threshold only
       the ``winners`` strongest fire, the rest receive lateral inhibition.
       Lateral weights grow (anti-Hebbian) between co-active neurons.
    3. Winning columns move toward the filtered input (potentiation of active,
       depression of silent lines); presynaptic spikes depress via the post trace.
    4. Thresholds integrate ``spike - target_rate * dt`` so each neuron's
       long-run rate settles on ``target_rate``.

    Returns ``(weights', state')``; inputs are not mutated.
    """
    x = np.asarray(input_spikes, dtype=float).reshape(-1)
    w = np.array(weights, dtype=float)
    n_in, n_out = w.shape
    if x.shape[0] != n_in or state.synaptic_filter_state.shape[0] != n_in:
        raise ValueError("input size does not match weights/state")
    if state.threshold_offsets.shape[0] != n_out or state.lateral_inhibition_weights.shape != (n_out, n_out):
        raise ValueError("layer size does not match weights/state")

    filt = state.synaptic_filter_state * math.exp(-dt / cfg.tau_filter) + x
    decay = math.exp(-dt / cfg.tau_m)
    drive = cfg.input_gain * (filt @ w)
    v = drive + (state.v - drive) * decay
    margin = v - (cfg.v_threshold + state.threshold_offsets)
    above = np.flatnonzero(margin >= 0)
    spikes = np.zeros(n_out, dtype=bool)
    if above.size:
        order = above[np.argsort(-margin[above], kind="stable")]
        spikes[order[: cfg.winners]] = True
    if spikes.any():
        v = v + spikes.astype(float) @ state.lateral_inhibition_weights
        v[spikes] = 0.0

    post_trace = state.post_trace * math.exp(-dt / cfg.tau_post)
    if spikes.any():
        mean = filt.mean()
        target = np.clip(0.5 * filt / mean, 0.0, 1.0) if mean > 0 else filt
        w[:, spikes] += cfg.lr * (target[:, None] - w[:, spikes])
    if x.any():
        w -= cfg.a_minus * np.outer(x, post_trace)
    np.clip(w, cfg.w_min, cfg.w_max, out=w)
    post_trace = post_trace + spikes

    lateral = state.lateral_inhibition_weights.copy()
    if spikes.any():
        coactive = np.outer(spikes, post_trace > 0.5) | np.outer(post_trace > 0.5, spikes)
        lateral -= cfg.lateral_lr * coactive
        np.fill_diagonal(lateral, 0.0)
        np.clip(lateral, -cfg.lateral_max, 0.0, out=lateral)

    expected = cfg.target_rate * dt / 1000.0
    theta = np.maximum(0.0, state.threshold_offsets + cfg.threshold_lr * (spikes - expected))

    new_state = replace(
        state,
        synaptic_filter_state=filt,
        lateral_inhibition_weights=lateral,
        threshold_offsets=theta,
        v=v,
        post_trace=post_trace,
        last_spikes=spikes,
    )
    return w, new_state
