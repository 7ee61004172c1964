import json
import os
import subprocess
import sys

import numpy as np
import pytest

from asmp import kernels
from asmp.node import Node, NodeConfig
from asmp.mvp import PeriodLimit
from asmp.sim.signals import DynamicParams, generate_dynamic_transition
from asmp.signal import TargetGrid

PROBE = r"""
import json, math
import numpy as np
from asmp import kernels, NUMBA_ENABLED
from asmp.sim.signals import DynamicParams, generate_dynamic_transition
rng = np.random.default_rng(3)
out = {"numba": NUMBA_ENABLED, "core": [], "rasa": None, "trace": []}
for _ in range(500):
    d, dp = rng.uniform(10, 40, 2)
    args = (d, dp, float(round(dp)), float(rng.uniform(0, 1)), float(rng.uniform(0.01, 1)),
            float(rng.uniform(0, 1)), 1.0, 0.2, math.inf, 0.0)
    out["core"].append([repr(float(x)) for x in kernels.asa_core(*args)])
n = 300
w = rng.uniform(0.01, 1, n); h = rng.uniform(0, 5, n); s = rng.uniform(0, 0.01, n); b = rng.uniform(1, 60, n)
out["rasa"] = kernels.rasa_factor_batch(w, h, s, b, 10**6).tolist()
for seed in range(3):
    sig = generate_dynamic_transition(DynamicParams(), seed)
    t, v, p, c = kernels.asa_trace(sig.times, sig.values, 1.0, 0.2, 0.2, math.inf, 0.0, 4950.0, 100000)
    out["trace"].append([repr(float(x)) for x in np.concatenate([t, v, p, c])])
print(json.dumps(out))
"""


def _probe(disable):
    env = dict(os.environ)
    env.pop("ASMP_DISABLE_NUMBA", None)
    env.pop("NUMBA_DISABLE_JIT", None)
    if disable:
        env["ASMP_DISABLE_NUMBA"] = "1"
    res = subprocess.run([sys.executable, "-c", PROBE], env=env, capture_output=True, text=True,
                         check=True)
    return json.loads(res.stdout)


def test_compiled_and_python_paths_agree():
    fast, slow = _probe(False), _probe(True)
    assert slow["numba"] is False
    for key in ("core", "rasa", "trace"):
        assert fast[key] == slow[key], key


@pytest.mark.parametrize("seed", range(5))
def test_trace_kernel_matches_node_pipeline(seed):
    sig = generate_dynamic_transition(DynamicParams(), seed)
    t, v, p, _ = kernels.asa_trace(sig.times, sig.values, 1.0, 0.2, 0.2, np.inf, 0.0, 4950.0, 100000)
    node = Node(0, NodeConfig(algorithm="asa-m", grid=TargetGrid(1.0, 0.2), initial_rate=0.2))
    times, now = [], 0.0
    while now is not None and now <= 4950.0:
        pkt, nxt = node.step(now, sig.clean(now), 0.0)
        times.append(now)
        now = nxt
    assert times == list(t)


def test_squared_grid_error():
    vals = np.array([20.0, 20.25, 19.6])
    assert kernels.squared_grid_error(vals, 1.0) == pytest.approx(0.0625 + 0.16)
    assert kernels.round_half_away(2.5) == 3.0 and kernels.round_half_away(-2.5) == -3.0
