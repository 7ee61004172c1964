"""Scenario files, validation and the built-in presets."""

from __future__ import annotations

import copy
import hashlib
import json
import math
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path
from typing import Any, Optional

import yaml

from ..casa import CasaConfig
from ..energy import PowerProfile
from ..harvest import ConstantHarvest, HarvestConfig, SolarHarvest, TraceHarvest
from ..mvp import PeriodLimit
from ..node import ALGORITHMS, NodeConfig
from ..signal import TargetGrid
from .signals import DynamicParams, generate_dynamic_transition, load_csv_trace, ramp
from .topology import Topology


class ScenarioError(ValueError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid scenario:\n  " + "\n  ".join(self.problems))


DEFAULTS: dict[str, Any] = {
    "name": "custom",
    "seed": 0,
    "duration": 3600.0,
    "algorithm": "asmp",
    "nodes": {"count": 1, "e_initial": None, "sleep_epochs": {}},
    "topology": {"cluster_size": 1, "relays": 0, "epoch": 600.0, "latency": 0.0},
    "signal": {"kind": "dynamic", "per_node": False},
    "harvest": {"kind": "solar"},
    "protocol": {
        "b_prime": 1.0, "alpha": 0.2, "initial_rate": 0.2, "t_max": math.inf,
        "floor_period": 0.0, "event_threshold": None, "v_event": None,
        "epsilon": 0.3, "L": None, "max_outage": 43200.0, "o_m": 1.0,
        "hysteresis": 1.1, "decline_fraction": 0.8, "decline_window": 10,
        "ewma_lambda": 0.001, "ewma_initial": None, "rasa_max_factor": 5,
        "margin_velocity": "event", "alarm_period": None,
    },
    "profile": {},
    "baseline": {"rate": None},
}

PRESETS: dict[str, dict] = {
    "dynamic": {
        "name": "dynamic",
        "duration": 4950.0,
        "signal": {"kind": "dynamic", "low": 16.0, "high": 43.0},
        # the run starts at dusk: no harvest for its whole length
        "harvest": {"kind": "solar", "phase_offset": 43200.0},
        "protocol": {"b_prime": 1.0, "alpha": 0.2, "initial_rate": 0.2, "t_max": math.inf,
                     "rasa_max_factor": 3},
        "baseline": {"rate": 0.2},
    },
    "open-access": {
        "name": "open-access",
        "duration": 86340.0,
        "signal": {"kind": "csv", "path": "builtin:open_access_day.csv"},
        # trace starts at midnight; daylight 06:00-18:00
        "harvest": {"kind": "solar", "phase_offset": 64800.0},
        "protocol": {"b_prime": 0.2, "alpha": 0.4, "initial_rate": 1 / 210.0, "t_max": 600.0},
        "baseline": {"rate": 1 / 210.0},
    },
}

_SIGNAL_KEYS = {"kind", "per_node", "path", "slope", "start_value", "value", "noise_std"} | {
    f.name for f in fields(DynamicParams)}
_HARVEST_KEYS = {"kind", "power", "path"} | {f.name for f in fields(HarvestConfig)}


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and k != "sleep_epochs":
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _as_float(v):
    if v is None:
        return None
    if isinstance(v, str) and v.strip().lower() in ("inf", "infinity", ".inf"):
        return math.inf
    return float(v)


@dataclass
class Scenario:
    raw: dict
    base_dir: Optional[Path] = None

    @property
    def name(self) -> str:
        return self.raw["name"]

    @property
    def seed(self) -> int:
        return int(self.raw["seed"])

    @property
    def duration(self) -> float:
        return float(self.raw["duration"])

    @property
    def algorithm(self) -> str:
        return self.raw["algorithm"]

    @property
    def n_nodes(self) -> int:
        return int(self.raw["nodes"]["count"])

    def with_overrides(self, **kw) -> "Scenario":
        raw = copy.deepcopy(self.raw)
        for k, v in kw.items():
            if v is None:
                continue
            if isinstance(v, dict):
                raw[k] = _merge(raw.get(k, {}), v)
            else:
                raw[k] = v
        return build_scenario(raw, self.base_dir, merged=True)

    def config_hash(self) -> str:
        blob = json.dumps(self.raw, sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()

    # builders ---------------------------------------------------------

    def grid(self) -> TargetGrid:
        p = self.raw["protocol"]
        return TargetGrid(float(p["b_prime"]), float(p["alpha"]), _as_float(p["event_threshold"]))

    def node_config(self, node_id: int = 0, algorithm: Optional[str] = None) -> NodeConfig:
        p = self.raw["protocol"]
        algorithm = algorithm or self.algorithm
        rate = float(p["initial_rate"])
        if algorithm == "fixed" and self.raw["baseline"].get("rate"):
            rate = float(self.raw["baseline"]["rate"])
        profile = PowerProfile(**self.raw["profile"])
        limit = PeriodLimit(t_max=_as_float(p["t_max"]), event_threshold=_as_float(p["event_threshold"]),
                            v_event=_as_float(p["v_event"]), floor_period=float(p["floor_period"]))
        e0 = self.raw["nodes"].get("e_initial")
        if isinstance(e0, (list, tuple)):
            e0 = e0[node_id]
        return NodeConfig(
            grid=self.grid(), casa=CasaConfig(float(p["epsilon"])), profile=profile, limit=limit,
            initial_rate=rate, algorithm=algorithm, L=_as_float(p["L"]),
            max_outage=float(p["max_outage"]), o_m=float(p["o_m"]),
            hysteresis=float(p["hysteresis"]), decline_fraction=float(p["decline_fraction"]),
            decline_window=int(p["decline_window"]), ewma_lambda=float(p["ewma_lambda"]),
            ewma_initial=_as_float(p["ewma_initial"]), rasa_max_factor=int(p["rasa_max_factor"]),
            margin_velocity=p["margin_velocity"], e_initial=_as_float(e0),
            alarm_period=_as_float(p["alarm_period"]),
        )

    def _resolve(self, path: str) -> Path:
        if path.startswith("builtin:"):
            return Path(str(resources.files("asmp") / "data" / path.split(":", 1)[1]))
        p = Path(path)
        if not p.is_absolute() and self.base_dir is not None:
            p = self.base_dir / p
        return p

    def signal(self, node_id: int = 0):
        s = self.raw["signal"]
        seed = self.seed + (node_id * 7919 if s.get("per_node") else 0)
        noise = float(s.get("noise_std", 0.0))
        kind = s["kind"]
        if kind == "dynamic":
            keys = {f.name for f in fields(DynamicParams)}
            params = {k: v for k, v in s.items() if k in keys}
            params.setdefault("duration", self.duration)
            return generate_dynamic_transition(DynamicParams(**params), seed)
        if kind == "csv":
            return load_csv_trace(self._resolve(s["path"]), noise, seed)
        if kind == "ramp":
            return ramp(float(s.get("slope", 0.0)), float(s.get("start_value", 20.0)),
                        max(self.duration, 1.0), noise, seed)
        if kind == "constant":
            v = float(s.get("value", 20.0))
            return ramp(0.0, v, max(self.duration, 1.0), noise, seed)
        raise ScenarioError([f"signal.kind: unknown kind {kind!r}"])

    def harvest(self):
        h = dict(self.raw["harvest"])
        kind = h.pop("kind")
        p_max = float(h.get("p_max", 500.0))
        if kind == "solar":
            h.pop("power", None)
            h.pop("path", None)
            h.setdefault("seed", self.seed)
            return SolarHarvest(HarvestConfig(**h))
        if kind == "constant":
            return ConstantHarvest(float(h["power"]), p_max)
        if kind == "trace":
            return TraceHarvest.from_csv(self._resolve(h["path"]), p_max)
        raise ScenarioError([f"harvest.kind: unknown kind {kind!r}"])

    def topology(self) -> Topology:
        t = self.raw["topology"]
        return Topology.chunked(self.n_nodes, int(t["cluster_size"]), int(t["relays"]))


def _validate(raw: dict) -> list:
    problems = []
    for key in raw:
        if key not in DEFAULTS:
            problems.append(f"unknown section {key!r}")
    for section in ("nodes", "topology", "protocol", "baseline"):
        for key in raw.get(section, {}) or {}:
            if key not in DEFAULTS[section]:
                problems.append(f"{section}.{key}: unknown key")
    for key in raw.get("signal", {}):
        if key not in _SIGNAL_KEYS:
            problems.append(f"signal.{key}: unknown key")
    for key in raw.get("harvest", {}):
        if key not in _HARVEST_KEYS:
            problems.append(f"harvest.{key}: unknown key")
    for key in raw.get("profile", {}):
        if key not in {f.name for f in fields(PowerProfile)}:
            problems.append(f"profile.{key}: unknown key")
    if problems:
        return problems

    def check(label, cond):
        if not cond:
            problems.append(label)

    try:
        check("duration must be positive", float(raw["duration"]) > 0)
    except (TypeError, ValueError):
        problems.append("duration must be a number")
    if not isinstance(raw["seed"], int) or isinstance(raw["seed"], bool):
        problems.append("seed must be an integer")
    check(f"algorithm must be one of {ALGORITHMS}", raw["algorithm"] in ALGORITHMS)
    n = raw["nodes"].get("count")
    check("nodes.count must be a positive integer", isinstance(n, int) and n >= 1)
    t = raw["topology"]
    check("topology.cluster_size must be >= 1", isinstance(t["cluster_size"], int) and t["cluster_size"] >= 1)
    check("topology.relays must be >= 0", isinstance(t["relays"], int) and t["relays"] >= 0)
    check("topology.epoch must be positive", _num(t["epoch"]) and float(t["epoch"]) > 0)
    check("topology.latency must be >= 0", _num(t["latency"]) and float(t["latency"]) >= 0)
    p = raw["protocol"]
    for key in ("b_prime", "alpha", "initial_rate", "epsilon", "hysteresis", "ewma_lambda"):
        check(f"protocol.{key} must be a number", _num(p[key]))
    if problems:
        return problems
    check("protocol.t_max must be positive", _as_float(p["t_max"]) > 0)
    check("protocol.margin_velocity must be 'event' or 'predicted'",
          p["margin_velocity"] in ("event", "predicted"))
    if raw["signal"].get("kind") not in ("dynamic", "csv", "ramp", "constant"):
        problems.append(f"signal.kind: unknown kind {raw['signal'].get('kind')!r}")
    if raw["signal"].get("kind") == "csv" and not raw["signal"].get("path"):
        problems.append("signal.path is required for csv signals")
    if raw["harvest"].get("kind") not in ("solar", "constant", "trace"):
        problems.append(f"harvest.kind: unknown kind {raw['harvest'].get('kind')!r}")
    if raw["harvest"].get("kind") == "constant" and raw["harvest"].get("power") is None:
        problems.append("harvest.power is required for constant harvest")
    if raw["harvest"].get("kind") == "trace" and not raw["harvest"].get("path"):
        problems.append("harvest.path is required for trace harvest")
    return problems


def _num(v) -> bool:
    try:
        _as_float(v)
        return v is not None
    except (TypeError, ValueError):
        return False


def build_scenario(raw: dict, base_dir: Optional[Path] = None, merged: bool = False) -> Scenario:
    """Validate a scenario mapping (merged over defaults) and build it.

    Every problem found is reported at once in :class:`ScenarioError`.
    """
    if not isinstance(raw, dict):
        raise ScenarioError(["scenario must be a mapping"])
    full = raw if merged else _merge(DEFAULTS, raw)
    problems = _validate(full)
    if problems:
        raise ScenarioError(problems)
    sc = Scenario(full, base_dir)
    # exercise the object builders so bad values surface now, not mid-run
    try:
        sc.node_config(0)
    except (TypeError, ValueError) as exc:
        problems.append(f"protocol/profile: {exc}")
    if full["harvest"]["kind"] != "trace":
        try:
            sc.harvest()
        except (TypeError, ValueError, KeyError) as exc:
            problems.append(f"harvest: {exc}")
    if full["signal"]["kind"] == "dynamic":
        try:
            sc.signal(0)
        except (TypeError, ValueError) as exc:
            problems.append(f"signal: {exc}")
    if problems:
        raise ScenarioError(problems)
    return sc


def preset(name: str) -> Scenario:
    try:
        return build_scenario(PRESETS[name])
    except KeyError:
        raise ScenarioError([f"unknown preset {name!r}; known: {sorted(PRESETS)}"]) from None


def load_scenario(source: str) -> Scenario:
    """Load a preset by name or a YAML/JSON scenario file by path."""
    if source in PRESETS:
        return preset(source)
    path = Path(source)
    if not path.is_file():
        raise FileNotFoundError(f"no preset or file named {source!r}")
    with open(path) as fh:
        raw = yaml.safe_load(fh) or {}
    if "preset" in raw:
        base = PRESETS.get(raw.pop("preset"))
        if base is None:
            raise ScenarioError([f"unknown preset in {path}"])
        raw = _merge(base, raw)
    return build_scenario(raw, path.parent.resolve())
