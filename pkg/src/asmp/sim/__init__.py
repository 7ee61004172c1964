"""Discrete-event simulation of a sensor field and its server."""

from .engine import SimResult, Simulation, run
from .scenario import PRESETS, Scenario, ScenarioError, build_scenario, load_scenario, preset
from .signals import (DynamicParams, PiecewiseLinearSignal, TraceLoadError,
                      generate_dynamic_transition, load_csv_trace)
from .topology import Topology, rotate_roles

__all__ = [
    "SimResult", "Simulation", "run", "PRESETS", "Scenario", "ScenarioError",
    "build_scenario", "load_scenario", "preset", "DynamicParams", "PiecewiseLinearSignal",
    "TraceLoadError", "generate_dynamic_transition", "load_csv_trace", "Topology",
    "rotate_roles",
]
