"""Deterministic clock-driven spiking simulation engine."""

from .network import Network, Population, Projection, SimRecord, simulate
from .neuron import NeuronParams, NeuronState, first_spike_time, lif_step, lif_update, run_constant_current
from .selection import wta_select
from .spikes import SpikeTrain, encode_poisson, encode_rate_window, rate_window_counts

__all__ = [
    "Network",
    "NeuronParams",
    "NeuronState",
    "Population",
    "Projection",
    "SimRecord",
    "SpikeTrain",
    "encode_poisson",
    "encode_rate_window",
    "first_spike_time",
    "lif_step",
    "lif_update",
    "rate_window_counts",
    "run_constant_current",
    "simulate",
    "wta_select",
]
