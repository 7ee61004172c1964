"""Compiled vs pure-Python kernel timings.

Runs each workload in a fresh interpreter, once with numba and once with
ASMP_DISABLE_NUMBA=1, and prints best-of-N wall times. The first compiled
call (JIT warm-up) is excluded from the timings.

    python3 benchmarks/bench_kernels.py --repeat 5
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, math, sys, time
import numpy as np
from asmp import kernels, NUMBA_ENABLED
from asmp.report import compare
from asmp.sim.scenario import preset
from asmp.sim.signals import DynamicParams, generate_dynamic_transition

repeat = int(sys.argv[1])
sig = generate_dynamic_transition(DynamicParams(duration=2e6), 1)
rng = np.random.default_rng(0)
n = 200_000
w, h = rng.uniform(0.01, 1, n), rng.uniform(0, 5, n)
s, b = rng.uniform(0, 0.01, n), rng.uniform(1, 60, n)
vals = rng.uniform(0, 40, 1_000_000)

work = {
    "asa_trace (2e6 s ramp walk)": lambda: kernels.asa_trace(
        sig.times, sig.values, 0.2, 0.2, 0.2, 600.0, 0.0, 2e6, 2_000_000),
    "rasa_factor_batch (2e5)": lambda: kernels.rasa_factor_batch(w, h, s, b, 10**6),
    "squared_grid_error (1e6)": lambda: kernels.squared_grid_error(vals, 0.2),
    "dynamic preset, 4 algorithms": lambda: compare(
        preset("dynamic"), ["fixed", "asa-m", "asa-m+casa", "asa-m+rasa"]),
}
out = {"numba": NUMBA_ENABLED, "times": {}}
for name, fn in work.items():
    fn()  # warm-up (JIT compile on the numba path)
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    out["times"][name] = best
print(json.dumps(out))
"""


def measure(disable, repeat):
    env = dict(os.environ)
    env.pop("ASMP_DISABLE_NUMBA", None)
    if disable:
        env["ASMP_DISABLE_NUMBA"] = "1"
    res = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    fast = measure(False, args.repeat)
    slow = measure(True, args.repeat)
    if not fast["numba"]:
        print("numba unavailable: both columns are pure Python")
    width = max(len(k) for k in fast["times"])
    print(f"{'workload':<{width}}  {'numba s':>9}  {'python s':>9}  {'speedup':>8}")
    for name, t_fast in fast["times"].items():
        t_slow = slow["times"][name]
        print(f"{name:<{width}}  {t_fast:9.4f}  {t_slow:9.4f}  {t_slow / t_fast:7.1f}x")


if __name__ == "__main__":
    main()
