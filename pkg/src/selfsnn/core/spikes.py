"""Spike trains and input encoders."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..rng import as_generator


@dataclass(frozen=True, eq=False)
class SpikeTrain:
    """Time-sorted spike events ``(time_ms, neuron_index)`` for ``neuron_count`` neurons.

    Events are stored as two parallel arrays sorted by time, then index.
    """

    neuron_count: int
    duration: float
    times: np.ndarray = field(default_factory=lambda: np.zeros(0))
    indices: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float).reshape(-1)
        indices = np.asarray(self.indices, dtype=np.int64).reshape(-1)
        if times.shape != indices.shape:
            raise ValueError("times and indices must have equal length")
        if self.neuron_count < 0:
            raise ValueError("neuron_count must be >= 0")
        if not self.duration >= 0:
            raise ValueError("duration must be >= 0")
        if times.size:
            if not np.all(np.isfinite(times)):
                raise ValueError("spike times must be finite")
            if times.min() < 0 or times.max() >= self.duration:
                raise ValueError("spike times must lie in [0, duration)")
            if indices.min() < 0 or indices.max() >= self.neuron_count:
                raise ValueError("neuron index out of range")
            order = np.lexsort((indices, times))
            times, indices = times[order], indices[order]
        times.setflags(write=False)
        indices.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "indices", indices)

    @classmethod
    def empty(cls, neuron_count: int, duration: float) -> "SpikeTrain":
        return cls(neuron_count, duration)

    @classmethod
    def from_events(cls, neuron_count: int, duration: float, events) -> "SpikeTrain":
        events = list(events)
        if not events:
            return cls(neuron_count, duration)
        t, i = zip(*events)
        return cls(neuron_count, duration, np.array(t, dtype=float), np.array(i, dtype=np.int64))

    @classmethod
    def from_raster(cls, raster: np.ndarray, dt: float = 1.0) -> "SpikeTrain":
        """Build from a ``(steps, neurons)`` count/boolean raster; repeated counts give repeated events."""
        raster = np.asarray(raster)
        steps, n = raster.shape
        counts = raster.astype(np.int64)
        step_idx, neuron_idx = np.nonzero(counts)
        reps = counts[step_idx, neuron_idx]
        return cls(n, steps * dt, np.repeat(step_idx * dt, reps), np.repeat(neuron_idx, reps))

    @property
    def events(self) -> list[tuple[float, int]]:
        return list(zip(self.times.tolist(), self.indices.tolist()))

    def __len__(self) -> int:
        return int(self.times.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SpikeTrain):
            return NotImplemented
        return (
            self.neuron_count == other.neuron_count
            and self.duration == other.duration
            and np.array_equal(self.times, other.times)
            and np.array_equal(self.indices, other.indices)
        )

    def counts(self) -> np.ndarray:
        return np.bincount(self.indices, minlength=self.neuron_count).astype(np.int64)

    def raster(self, dt: float = 1.0) -> np.ndarray:
        """Spike counts per ``(step, neuron)`` using ``floor(t / dt)`` binning."""
        steps = int(math.ceil(self.duration / dt - 1e-9))
        out = np.zeros((steps, self.neuron_count), dtype=np.int64)
        if len(self):
            bins = np.minimum((self.times / dt + 1e-9).astype(np.int64), steps - 1)
            np.add.at(out, (bins, self.indices), 1)
        return out

    def shifted(self, offset: float) -> "SpikeTrain":
        """Shift all events by ``offset`` ms, dropping those that leave ``[0, duration)``."""
        t = self.times + offset
        keep = (t >= 0) & (t < self.duration)
        return SpikeTrain(self.neuron_count, self.duration, t[keep], self.indices[keep])

    def merged(self, other: "SpikeTrain") -> "SpikeTrain":
        if other.neuron_count != self.neuron_count or other.duration != self.duration:
            raise ValueError("can only merge trains with equal neuron_count and duration")
        return SpikeTrain(
            self.neuron_count, self.duration,
            np.concatenate([self.times, other.times]),
            np.concatenate([self.indices, other.indices]),
        )

    def to_dict(self) -> dict:
        return {
            "neuron_count": int(self.neuron_count),
            "duration": float(self.duration),
            "events": [[float(t), int(i)] for t, i in zip(self.times, self.indices)],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SpikeTrain":
        return cls.from_events(int(data["neuron_count"]), float(data["duration"]),
                               [(float(t), int(i)) for t, i in data["events"]])


def encode_poisson(rates, duration: float, seed=0) -> SpikeTrain:
    """Independent homogeneous Poisson processes, one per rate (Hz).

    Counts are drawn from ``Poisson(rate * duration / 1000)`` and placed
    uniformly in ``[0, duration)``, which is the exact conditional law.
    """
    rates = np.asarray(rates, dtype=float).reshape(-1)
    if not np.all(np.isfinite(rates)):
        raise ValueError("rates must be finite")
    if np.any(rates < 0):
        raise ValueError("rates must be >= 0")
    if not duration > 0:
        raise ValueError("duration must be > 0")
    rng = as_generator(seed, "encode_poisson")
    counts = rng.poisson(rates * duration / 1000.0)
    idx = np.repeat(np.arange(rates.size), counts)
    times = rng.uniform(0.0, duration, size=idx.size)
    return SpikeTrain(rates.size, duration, times, idx)


def rate_window_counts(values, duration_T: float, max_rate: float = 0.1) -> np.ndarray:
    values = np.asarray(values, dtype=float).reshape(-1)
    if not np.all(np.isfinite(values)) or np.any(values < 0) or np.any(values > 1):
        raise ValueError("values must lie in [0, 1]")
    if not duration_T > 0:
        raise ValueError("duration_T must be > 0")
    if not max_rate > 0:
        raise ValueError("max_rate must be > 0")
    # round half up; a tiny epsilon absorbs float residue in products like 0.3*100*0.1
    return np.floor(values * duration_T * max_rate + 0.5 + 1e-9).astype(np.int64)


def encode_rate_window(values, duration_T: float, max_rate: float = 0.1) -> SpikeTrain:
    """Deterministic rate code: ``round(value * T * max_rate)`` evenly spaced spikes per neuron.

    ``max_rate`` is in spikes per ms.  Spike ``k`` of ``n`` sits at ``k * T / n``.
    """
    counts = rate_window_counts(values, duration_T, max_rate)
    times, idx = [], []
    for neuron, n in enumerate(counts):
        if n:
            times.append(np.arange(n) * (duration_T / n))
            idx.append(np.full(n, neuron))
    if not times:
        return SpikeTrain(counts.size, duration_T)
    return SpikeTrain(counts.size, duration_T, np.concatenate(times), np.concatenate(idx))
