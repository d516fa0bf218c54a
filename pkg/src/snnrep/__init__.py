"""Exact simulation, synthesis and verification of feedforward spiking networks."""

from .model import INFINITE, ZERO, MemoryMode, Network, SparseLayer, stats
from .simulator import decay_stream, simulate_network, simulate_unit
from .spikes import MonotoneMap, SpikeTrain

__all__ = [
    "INFINITE",
    "ZERO",
    "MemoryMode",
    "MonotoneMap",
    "Network",
    "SparseLayer",
    "SpikeTrain",
    "decay_stream",
    "simulate_network",
    "simulate_unit",
    "stats",
]
