"""Leaky integrate-and-fire dynamics.

Membrane equation (dimensionless potential, time in ms)::

    tau_m dv/dt = -(v - v_rest) + resistance * I

integrated with the exponential-Euler scheme, which is exact for input held
constant over a step.  Spikes are registered at the end of the step in which
the threshold is crossed; callers that timestamp spikes use the step's start
time so that all event times fall inside ``[0, duration)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np


@dataclass(frozen=True)
class NeuronParams:
    """LIF parameters.  Defaults: tau_m 10 ms, rest 0, threshold 1, reset 0, refractory 2 ms."""

    tau_m: float = 10.0
    v_rest: float = 0.0
    v_threshold: float = 1.0
    v_reset: float = 0.0
    t_refractory: float = 2.0
    resistance: float = 1.0

    def __post_init__(self):
        if not self.tau_m > 0:
            raise ValueError("tau_m must be > 0")
        if not self.v_threshold > self.v_reset:
            raise ValueError("v_threshold must exceed v_reset")
        if not self.t_refractory >= 0:
            raise ValueError("t_refractory must be >= 0")
        for name in ("tau_m", "v_rest", "v_threshold", "v_reset", "t_refractory", "resistance"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    def to_dict(self) -> dict:
        return {
            "tau_m": self.tau_m,
            "v_rest": self.v_rest,
            "v_threshold": self.v_threshold,
            "v_reset": self.v_reset,
            "t_refractory": self.t_refractory,
            "resistance": self.resistance,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "NeuronParams":
        return cls(**{k: float(v) for k, v in data.items()})


@dataclass(frozen=True)
class NeuronState:
    v: float = 0.0
    refractory_remaining: float = 0.0
    adaptive_threshold_offset: float = 0.0

    def __post_init__(self):
        if self.refractory_remaining < 0:
            raise ValueError("refractory_remaining must be >= 0")
        if self.adaptive_threshold_offset < 0:
            raise ValueError("adaptive_threshold_offset must be >= 0")


def lif_update(v, refractory, params: NeuronParams, current, dt: float,
               jump=0.0, threshold_offset=0.0):
    """Vectorised LIF step.

    ``current`` drives the membrane continuously over the step; ``jump`` is an
    instantaneous potential increment (delta synapses) applied after the leak.
    Returns ``(v, refractory, spiked)`` as new arrays.
    """
    v = np.asarray(v, dtype=float)
    refractory = np.asarray(refractory, dtype=float)
    decay = math.exp(-dt / params.tau_m)
    v_inf = params.v_rest + params.resistance * np.asarray(current, dtype=float)
    v_new = v_inf + (v - v_inf) * decay + jump
    blocked = refractory > 1e-9
    v_new = np.where(blocked, params.v_reset, v_new)
    spiked = (~blocked) & (v_new >= params.v_threshold + threshold_offset)
    v_new = np.where(spiked, params.v_reset, v_new)
    # round away float residue so an integer number of dt steps is blocked
    ref_new = np.where(blocked, np.maximum(0.0, np.round(refractory - dt, 9)), refractory)
    ref_new = np.where(spiked, params.t_refractory, ref_new)
    return v_new, ref_new, spiked


def lif_step(state: NeuronState, params: NeuronParams, input_current: float,
             dt: float = 1.0) -> tuple[NeuronState, bool]:
    if not dt > 0:
        raise ValueError("dt must be > 0")
    if not math.isfinite(input_current):
        raise ValueError("input_current must be finite")
    v, ref, spiked = lif_update(
        state.v, state.refractory_remaining, params, input_current, dt,
        threshold_offset=state.adaptive_threshold_offset,
    )
    return replace(state, v=float(v), refractory_remaining=float(ref)), bool(spiked)


def first_spike_time(params: NeuronParams, input_current: float, v0: float | None = None) -> float:
    """Closed-form first threshold crossing under constant current (``inf`` if never)."""
    v_inf = params.v_rest + params.resistance * input_current
    v0 = params.v_rest if v0 is None else v0
    if v0 >= params.v_threshold:
        return 0.0
    if v_inf <= params.v_threshold:
        return math.inf
    return params.tau_m * math.log((v_inf - v0) / (v_inf - params.v_threshold))


def run_constant_current(params: NeuronParams, input_current: float, duration: float,
                         dt: float = 1.0) -> list[float]:
    """Spike times (step start times) of a single neuron driven by a constant current."""
    state = NeuronState(v=params.v_rest)
    times = []
    n_steps = int(round(duration / dt))
    for i in range(n_steps):
        state, spiked = lif_step(state, params, input_current, dt)
        if spiked:
            times.append(i * dt)
    return times
