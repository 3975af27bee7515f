"""Reward-modulated STDP: eligibility traces gated by a dopamine signal."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .stdp import StdpParams


@dataclass(frozen=True)
class EligibilityTrace:
    """Per-synapse eligibility plus the pre/post spike traces that feed it.

    ``values`` has shape ``(n_pre, n_post)``.
    """

    values: np.ndarray
    tau_e: float = 200.0
    pre_trace: np.ndarray | None = None
    post_trace: np.ndarray | None = None

    def __post_init__(self):
        if not self.tau_e > 0:
            raise ValueError("tau_e must be > 0")
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        n_pre, n_post = values.shape
        if self.pre_trace is None:
            object.__setattr__(self, "pre_trace", np.zeros(n_pre))
        if self.post_trace is None:
            object.__setattr__(self, "post_trace", np.zeros(n_post))

    @classmethod
    def zeros(cls, n_pre: int, n_post: int, tau_e: float = 200.0) -> "EligibilityTrace":
        return cls(np.zeros((n_pre, n_post)), tau_e)


def update_eligibility(trace: EligibilityTrace, pre_spikes, post_spikes,
                       stdp: StdpParams, dt: float = 1.0) -> EligibilityTrace:
    """Decay by ``exp(-dt/tau_e)``, then add the STDP delta of every spike pair.

    A post spike adds ``a_plus * exp(-lag/tau_plus)`` for each earlier pre
    spike; a pre spike adds ``-a_minus * exp(-lag/tau_minus)`` for each earlier
    post spike.  Pairs within the same step contribute nothing.
    """
    if not dt > 0:
        raise ValueError("dt must be > 0")
    pre = np.asarray(pre_spikes, dtype=float).reshape(-1)
    post = np.asarray(post_spikes, dtype=float).reshape(-1)
    pre_tr = trace.pre_trace * math.exp(-dt / stdp.tau_plus)
    post_tr = trace.post_trace * math.exp(-dt / stdp.tau_minus)
    values = trace.values * math.exp(-dt / trace.tau_e)
    if post.any():
        values = values + stdp.a_plus * np.outer(pre_tr, post)
    if pre.any():
        values = values - stdp.a_minus * np.outer(pre, post_tr)
    return replace(trace, values=values, pre_trace=pre_tr + pre, post_trace=post_tr + post)


def rstdp_apply(weights, trace: EligibilityTrace | np.ndarray, dopamine: float, lr: float,
                w_min: float = -math.inf, w_max: float = math.inf) -> np.ndarray:
    """``w + lr * dopamine * trace`` clamped to ``[w_min, w_max]``."""
    values = trace.values if isinstance(trace, EligibilityTrace) else np.asarray(trace, dtype=float)
    w = np.asarray(weights, dtype=float)
    if values.shape != w.shape:
        raise ValueError("trace and weights must have the same shape")
    return np.clip(w + lr * dopamine * values, w_min, w_max)


class DopamineBaseline:
    """Running average of reward; ``rpe(r) = r - baseline`` before the baseline moves."""

    def __init__(self, rate: float = 0.01, value: float = 0.0):
        self.rate = rate
        self.value = value

    def rpe(self, reward: float) -> float:
        delta = reward - self.value
        self.value += self.rate * delta
        return delta
