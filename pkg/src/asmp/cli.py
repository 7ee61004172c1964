"""Command-line entry point: ``asmp run`` and ``asmp compare``."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import __version__
from .node import ALGORITHMS
from .report import compare
from .sim.engine import run
from .sim.scenario import PRESETS, ScenarioError, load_scenario
from .sim.signals import TraceLoadError

EXIT_USAGE = 2
EXIT_CONFIG = 3


def _algorithms(text):
    names = [a.strip() for a in text.split(",") if a.strip()]
    bad = [a for a in names if a not in ALGORITHMS]
    if bad:
        raise argparse.ArgumentTypeError(
            "unknown algorithm(s): " + ", ".join(bad) + "; choose from " + ", ".join(ALGORITHMS))
    return names


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="asmp", description="Adaptive sampling sensor-field simulator")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True,
                       help=f"scenario file (YAML) or preset name: {', '.join(PRESETS)}")
        p.add_argument("--out", required=True, type=Path, help="output directory")
        p.add_argument("--seed", type=int, help="override the scenario seed")
        p.add_argument("--duration", type=float, help="override the run length (s)")

    run_p = sub.add_parser("run", help="run one scenario and write its artifacts")
    common(run_p)
    run_p.add_argument("--algorithms", type=_algorithms,
                       help="single algorithm to run (default: the scenario's)")
    run_p.add_argument("--verify", action="store_true",
                       help="recompute every node decision server-side and fail on mismatch")

    cmp_p = sub.add_parser("compare", help="run several algorithms on the same signal")
    common(cmp_p)
    cmp_p.add_argument("--algorithms", type=_algorithms,
                       default=["fixed", "asa-m", "asa-m+casa", "asa-m+rasa"],
                       help="comma separated, at least two (default: %(default)s)")
    cmp_p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    return ap


def _load(args):
    scenario = load_scenario(args.config)
    overrides = {k: getattr(args, k) for k in ("seed", "duration") if getattr(args, k) is not None}
    if overrides:
        scenario = scenario.with_overrides(**overrides)
    return scenario, overrides


def _manifest(path, scenario, overrides, extra):
    data = {
        "version": __version__,
        "scenario": scenario.name,
        "seed": scenario.seed,
        "config_hash": scenario.config_hash(),
        "overrides": overrides,
        "config": scenario.raw,
    }
    data.update(extra)
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def cmd_run(args) -> int:
    scenario, overrides = _load(args)
    algorithm = None
    if args.algorithms:
        if len(args.algorithms) != 1:
            print("run takes a single algorithm; use compare for several", file=sys.stderr)
            return EXIT_USAGE
        algorithm = args.algorithms[0]
        overrides["algorithm"] = algorithm
    res = run(scenario, algorithm, verify=args.verify)
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    res.plane.write_csv(out / "plane.csv")
    res.write_trace(out / "trace.csv")
    res.write_ledgers(out / "ledgers.csv")
    m = res.metrics
    with open(out / "metrics.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["metric", "value"])
        w.writerow(["algorithm", res.algorithm])
        w.writerow(["sample_count", m.sample_count])
        w.writerow(["predicted_count", m.predicted_count])
        w.writerow(["mse_sampled", repr(m.mse_sampled)])
        w.writerow(["plane_max_gap_s", repr(m.plane_max_gap)])
        w.writerow(["energy_mwh_total", repr(m.total_energy_mwh)])
        for node, e in m.energy_mwh.items():
            w.writerow([f"energy_mwh_node{node}", repr(e)])
        w.writerow(["empty", int(m.empty)])
    _manifest(out / "manifest.json", scenario, overrides, {"algorithm": res.algorithm})
    print(f"{res.algorithm}: {m.sample_count} samples, {m.predicted_count} predicted, "
          f"{m.total_energy_mwh:.4f} mWh, MSE {m.mse_sampled:.4f} -> {out}")
    return 0


def cmd_compare(args) -> int:
    if len(args.algorithms) < 2:
        print("compare needs at least two algorithms", file=sys.stderr)
        return EXIT_USAGE
    scenario, overrides = _load(args)
    report = compare(scenario, args.algorithms, jobs=args.jobs)
    args.out.mkdir(parents=True, exist_ok=True)
    report.write_csv(args.out / "report.csv")
    table = report.table()
    (args.out / "report.txt").write_text(table + "\n")
    _manifest(args.out / "manifest.json", scenario, overrides, {"algorithms": args.algorithms})
    print(table)
    return 0


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        return cmd_compare(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ScenarioError, TraceLoadError) as exc:
        print("error: invalid configuration", file=sys.stderr)
        for p in exc.problems:
            print(f"  - {p}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
