"""Dynamic multicore-fiber elastic optical network simulator.

Event-driven evaluation of routing/modulation/spectrum/core allocation:
three k-shortest-path baseline policies, a reset/step agent environment
with +/-1 rewards, and blocking accounting split by cause.
"""

from .engine import BlockingStats, Decision, Outcome, SimConfig, Simulation
from .heuristics import make_policy
from .physics import ModulationFormat, XtParams
from .rl_env import EpisodeConfig, RmscaEnv
from .spectrum import SlotBlock, SpectrumGrid
from .topology import Topology, load_topology
from .traffic import ConnectionRequest, TrafficConfig, TrafficGenerator

__version__ = "0.1.0"

__all__ = [
    "BlockingStats",
    "ConnectionRequest",
    "Decision",
    "EpisodeConfig",
    "ModulationFormat",
    "Outcome",
    "RmscaEnv",
    "SimConfig",
    "Simulation",
    "SlotBlock",
    "SpectrumGrid",
    "Topology",
    "TrafficConfig",
    "TrafficGenerator",
    "XtParams",
    "load_topology",
    "make_policy",
]
