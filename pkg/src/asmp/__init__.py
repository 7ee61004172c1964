"""Adaptive sampling for energy-harvesting sensor networks.

Node-side rate estimation (ASA-m, CASA, RASA), energy and harvest models,
a server data plane with dual prediction, and a deterministic simulator.
"""

__version__ = "0.1.0"

from ._jit import NUMBA_ENABLED
from .casa import CasaConfig, CasaDecision, casa_step
from .energy import EnergyLedger, Mode, OperationTally, PowerProfile, mj_to_mwh
from .harvest import ConstantHarvest, HarvestConfig, SolarHarvest, TraceHarvest
from .mvp import AsaState, EventImminent, PeriodLimit, RateDecision, asa_step, next_rate
from .node import Node, NodeClass, NodeConfig, NodePacket, classify
from .rasa import EwmaTracker, RasaDecision, min_rasa_factor, rasa_step
from .server import PlanePoint, QosMetrics, ServerPlane, compute_metrics
from .signal import Quantization, Sample, SamplingCondition, TargetGrid, classify_distance, quantize

__all__ = [
    "NUMBA_ENABLED", "CasaConfig", "CasaDecision", "casa_step", "EnergyLedger", "Mode",
    "OperationTally", "PowerProfile", "mj_to_mwh", "ConstantHarvest", "HarvestConfig",
    "SolarHarvest", "TraceHarvest", "AsaState", "EventImminent", "PeriodLimit", "RateDecision",
    "asa_step", "next_rate", "Node", "NodeClass", "NodeConfig", "NodePacket", "classify",
    "EwmaTracker", "RasaDecision", "min_rasa_factor", "rasa_step", "PlanePoint", "QosMetrics",
    "ServerPlane", "compute_metrics", "Quantization", "Sample", "SamplingCondition",
    "TargetGrid", "classify_distance", "quantize",
]
