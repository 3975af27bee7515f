"""Populations, projections and the clock-driven simulator."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from ..rng import as_generator
from .neuron import NeuronParams, lif_update
from .spikes import SpikeTrain


@dataclass
class Population:
    name: str
    size: int
    params: NeuronParams = field(default_factory=NeuronParams)
    noise_std: float = 0.0

    def __post_init__(self):
        if self.size < 0:
            raise ValueError("population size must be >= 0")


@dataclass
class Projection:
    """Synapses ``source -> target``; ``weights`` has shape ``(source.size, target.size)``.

    A presynaptic spike adds its weight to the postsynaptic membrane
    potential ``delay`` ms later (delta synapse).  Negative weights inhibit.
    """

    source: str
    target: str
    weights: np.ndarray
    delay: float = 1.0
    rule: str | None = None

    def __post_init__(self):
        self.weights = np.array(self.weights, dtype=float)
        if self.weights.ndim != 2:
            raise ValueError("weights must be a 2-D matrix")
        if not np.all(np.isfinite(self.weights)):
            raise ValueError("weights must be finite")
        if not self.delay >= 0:
            raise ValueError("delay must be >= 0")

    def delay_steps(self, dt: float) -> int:
        # fractional delays round up; zero delay still lands on the next step
        return max(1, int(math.ceil(self.delay / dt - 1e-9)))


@dataclass
class Network:
    populations: list[Population] = field(default_factory=list)
    projections: list[Projection] = field(default_factory=list)

    def population(self, name: str) -> Population:
        for pop in self.populations:
            if pop.name == name:
                return pop
        raise KeyError(f"unknown population {name!r}")

    def add_population(self, name: str, size: int, params: NeuronParams | None = None,
                       noise_std: float = 0.0) -> Population:
        if any(p.name == name for p in self.populations):
            raise ValueError(f"duplicate population {name!r}")
        pop = Population(name, size, params or NeuronParams(), noise_std)
        self.populations.append(pop)
        return pop

    def connect(self, source: str, target: str, weights, delay: float = 1.0,
                rule: str | None = None) -> Projection:
        src, tgt = self.population(source), self.population(target)
        weights = np.asarray(weights, dtype=float)
        if weights.ndim == 0:
            weights = np.full((src.size, tgt.size), float(weights))
        proj = Projection(source, target, weights, delay, rule)
        self.projections.append(proj)
        self.validate()
        return proj

    def validate(self) -> None:
        names = [p.name for p in self.populations]
        if len(set(names)) != len(names):
            raise ValueError("population names must be unique")
        for proj in self.projections:
            src, tgt = self.population(proj.source), self.population(proj.target)
            if proj.weights.shape != (src.size, tgt.size):
                raise ValueError(
                    f"projection {proj.source}->{proj.target} has shape {proj.weights.shape}, "
                    f"expected {(src.size, tgt.size)}"
                )

    def to_dict(self) -> dict:
        return {
            "populations": [
                {"name": p.name, "size": p.size, "params": p.params.to_dict(), "noise_std": p.noise_std}
                for p in self.populations
            ],
            "projections": [
                {
                    "source": pr.source,
                    "target": pr.target,
                    "shape": list(pr.weights.shape),
                    "weights": pr.weights.reshape(-1).tolist(),
                    "delay": pr.delay,
                    "rule": pr.rule,
                }
                for pr in self.projections
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Network":
        net = cls()
        for p in data["populations"]:
            net.add_population(p["name"], int(p["size"]), NeuronParams.from_dict(p["params"]),
                               float(p.get("noise_std", 0.0)))
        for pr in data["projections"]:
            shape = tuple(pr["shape"])
            net.connect(pr["source"], pr["target"],
                        np.asarray(pr["weights"], dtype=float).reshape(shape),
                        float(pr["delay"]), pr.get("rule"))
        return net

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Network":
        return cls.from_dict(json.loads(text))


@dataclass
class SimRecord:
    duration: float
    dt: float
    spikes: dict[str, SpikeTrain] = field(default_factory=dict)
    traces: dict[str, np.ndarray] = field(default_factory=dict)
    weights: dict[int, np.ndarray] = field(default_factory=dict)

    def counts(self, name: str) -> np.ndarray:
        return self.spikes[name].counts()

    def __eq__(self, other) -> bool:
        if not isinstance(other, SimRecord):
            return NotImplemented
        return (
            self.duration == other.duration
            and self.dt == other.dt
            and self.spikes.keys() == other.spikes.keys()
            and all(self.spikes[k] == other.spikes[k] for k in self.spikes)
            and self.traces.keys() == other.traces.keys()
            and all(np.array_equal(self.traces[k], other.traces[k]) for k in self.traces)
            and self.weights.keys() == other.weights.keys()
            and all(np.array_equal(self.weights[k], other.weights[k]) for k in self.weights)
        )


# A learning rule receives (weights, pre_spikes, post_spikes, dt) each step and
# updates ``weights`` in place.  Stateful rules are objects with __call__.
LearningRule = Callable[[np.ndarray, np.ndarray, np.ndarray, float], None]


def _current_schedule(value, steps: int, size: int) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("input currents must be finite")
    if arr.ndim == 0:
        return np.full((1, size), float(arr))
    if arr.ndim == 1:
        if arr.shape[0] != size:
            raise ValueError(f"current vector has length {arr.shape[0]}, expected {size}")
        return arr.reshape(1, size)
    if arr.shape != (steps, size):
        raise ValueError(f"current schedule has shape {arr.shape}, expected {(steps, size)}")
    return arr


def simulate(network: Network, inputs: Mapping[str, object] | None, duration: float,
             dt: float = 1.0, seed=0, record_v: bool = False,
             rules: Mapping[str, LearningRule] | None = None,
             record_weights: bool = False) -> SimRecord:
    """Synchronous clock-driven simulation.

    ``inputs`` maps a population name to either a :class:`SpikeTrain`
    (events are forced as spikes of that population) or a current: a scalar,
    a per-neuron vector, or a ``(steps, size)`` schedule.  ``rules`` maps a
    projection's rule tag to a learning rule applied after every step.
    """
    if not duration > 0:
        raise ValueError("duration must be > 0")
    if not dt > 0:
        raise ValueError("dt must be > 0")
    network.validate()
    inputs = dict(inputs or {})
    rules = dict(rules or {})
    steps = int(round(duration / dt))
    if abs(steps * dt - duration) > 1e-9:
        raise ValueError("duration must be an integer multiple of dt")

    pops = {p.name: p for p in network.populations}
    for name in inputs:
        if name not in pops:
            raise KeyError(f"input references unknown population {name!r}")

    forced: dict[str, np.ndarray] = {}
    currents: dict[str, np.ndarray] = {}
    for name, value in inputs.items():
        size = pops[name].size
        if isinstance(value, SpikeTrain):
            if value.neuron_count != size:
                raise ValueError(f"spike input for {name!r} has {value.neuron_count} neurons, expected {size}")
            raster = np.zeros((steps, size), dtype=np.int64)
            if len(value):
                bins = (value.times / dt + 1e-9).astype(np.int64)
                keep = bins < steps
                np.add.at(raster, (bins[keep], value.indices[keep]), 1)
            forced[name] = raster
        else:
            currents[name] = _current_schedule(value, steps, size)

    noise_rng = {
        p.name: as_generator(seed, "simulate-noise", p.name) for p in network.populations if p.noise_std > 0
    }

    max_delay = max((pr.delay_steps(dt) for pr in network.projections), default=1)
    ring = max_delay + 1
    buffers = {p.name: np.zeros((ring, p.size)) for p in network.populations}
    v = {p.name: np.full(p.size, p.params.v_rest) for p in network.populations}
    ref = {p.name: np.zeros(p.size) for p in network.populations}
    spike_steps: dict[str, list[np.ndarray]] = {p.name: [] for p in network.populations}
    traces = {p.name: np.zeros((steps, p.size)) for p in network.populations} if record_v else {}
    delays = [pr.delay_steps(dt) for pr in network.projections]

    for step in range(steps):
        slot = step % ring
        step_spikes = {}
        for pop in network.populations:
            name = pop.name
            jump = buffers[name][slot]
            sched = currents.get(name)
            if sched is None:
                cur = 0.0
            else:
                cur = sched[step] if sched.shape[0] > 1 else sched[0]
            if pop.noise_std > 0:
                cur = cur + noise_rng[name].normal(0.0, pop.noise_std, pop.size)
            v_new, ref_new, spiked = lif_update(v[name], ref[name], pop.params, cur, dt, jump=jump)
            counts = spiked.astype(np.int64)
            if name in forced:
                counts = np.maximum(counts, forced[name][step])
            v[name], ref[name] = v_new, ref_new
            buffers[name][slot] = 0.0
            step_spikes[name] = counts
            if record_v:
                traces[name][step] = v_new
            spike_steps[name].append(counts)
        for proj, d in zip(network.projections, delays):
            pre = step_spikes[proj.source]
            if pre.any():
                buffers[proj.target][(step + d) % ring] += pre @ proj.weights
        for proj in network.projections:
            if proj.rule is not None and proj.rule in rules:
                rules[proj.rule](proj.weights, step_spikes[proj.source], step_spikes[proj.target], dt)

    record = SimRecord(duration=steps * dt, dt=dt)
    for pop in network.populations:
        raster = np.array(spike_steps[pop.name]).reshape(steps, pop.size)
        record.spikes[pop.name] = SpikeTrain.from_raster(raster, dt)
    record.traces = traces
    if record_weights:
        record.weights = {i: pr.weights.copy() for i, pr in enumerate(network.projections)}
    return record
