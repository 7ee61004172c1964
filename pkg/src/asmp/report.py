"""Algorithm comparison reports."""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

from .node import ALGORITHMS
from .sim.engine import SimResult, run
from .sim.scenario import Scenario


@dataclass(frozen=True)
class ReportRow:
    algorithm: str
    energy_mwh: float
    sample_count: int
    predicted_count: int
    mse: float
    max_gap: float
    final_e_r: tuple  # per node, mJ


def row_from_result(res: SimResult) -> ReportRow:
    m = res.metrics
    return ReportRow(res.algorithm, m.total_energy_mwh, m.sample_count, m.predicted_count,
                     m.mse_sampled, m.plane_max_gap,
                     tuple(l.e_r for _, l in sorted(res.ledgers.items())))


def reduction(variant: float, fixed: float) -> Optional[float]:
    """Fractional reduction of ``variant`` relative to ``fixed``."""
    if fixed == 0:
        return None
    return 1.0 - variant / fixed


@dataclass
class RunReport:
    rows: list

    def row(self, algorithm: str) -> ReportRow:
        for r in self.rows:
            if r.algorithm == algorithm:
                return r
        raise KeyError(algorithm)

    @property
    def fixed(self) -> Optional[ReportRow]:
        return next((r for r in self.rows if r.algorithm == "fixed"), None)

    def reductions(self, row: ReportRow) -> tuple:
        f = self.fixed
        if f is None:
            return None, None
        return reduction(row.energy_mwh, f.energy_mwh), reduction(row.sample_count, f.sample_count)

    def write_csv(self, path) -> None:
        n_nodes = max((len(r.final_e_r) for r in self.rows), default=0)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["algorithm", "energy_mwh", "sample_count", "predicted_count", "mse",
                        "max_gap_s", "energy_reduction", "sample_reduction"]
                       + [f"final_e_r_mj_node{i}" for i in range(n_nodes)])
            for r in self.rows:
                de, ds = self.reductions(r)
                w.writerow([r.algorithm, repr(r.energy_mwh), r.sample_count, r.predicted_count,
                            repr(r.mse), repr(r.max_gap),
                            "" if de is None else repr(de), "" if ds is None else repr(ds)]
                           + [repr(e) for e in r.final_e_r])

    def table(self) -> str:
        head = ("algorithm", "energy mWh", "samples", "predicted", "MSE", "max gap s",
                "energy -%", "samples -%")
        lines = []
        for r in self.rows:
            de, ds = self.reductions(r)
            lines.append((r.algorithm, f"{r.energy_mwh:.4f}", str(r.sample_count),
                          str(r.predicted_count), f"{r.mse:.4f}", f"{r.max_gap:.1f}",
                          "-" if de is None else f"{100 * de:.1f}",
                          "-" if ds is None else f"{100 * ds:.1f}"))
        widths = [max(len(h), *(len(l[i]) for l in lines)) for i, h in enumerate(head)]
        fmt = lambda cells: "  ".join(c.rjust(w) if i else c.ljust(w)
                                      for i, (c, w) in enumerate(zip(cells, widths)))
        return "\n".join([fmt(head), fmt(["-" * w for w in widths])] + [fmt(l) for l in lines])


def _run_one(args):
    scenario, algorithm = args
    return row_from_result(run(scenario, algorithm))


def compare(scenario: Scenario, algorithms: Sequence[str], jobs: int = 1) -> RunReport:
    """Run every algorithm on the same scenario (same seed, same signal)."""
    if len(algorithms) < 2:
        raise ValueError("compare needs at least two algorithms")
    unknown = [a for a in algorithms if a not in ALGORITHMS]
    if unknown:
        raise ValueError("unknown algorithm(s): " + ", ".join(unknown)
                         + f"; choose from {', '.join(ALGORITHMS)}")
    work = [(scenario, a) for a in algorithms]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_run_one, work))
    else:
        rows = [_run_one(w) for w in work]
    return RunReport(rows)
