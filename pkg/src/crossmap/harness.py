"""Benchmark harness: timed mapping runs and experiment CSVs."""

from __future__ import annotations

import csv
import logging
import math
import os
import statistics
import sys
import time
from dataclasses import dataclass, field, fields, replace
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .graph import SpikeGraph, TopologySpec, generate_feedforward, load_graph
from .greedy import greedy_partition
from .hill_climb import ClimbTrace, climb
from .oracle import exhaustive_contiguous
from .partition import CostReport, HardwareConfig, Partition, max_cost
from .pso import PsoConfig, pso_partition

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

logger = logging.getLogger(__name__)

CSV_HEADER = (
    "workload",
    "n",
    "synapses",
    "total_spikes",
    "algo",
    "k",
    "s",
    "seed",
    "wall_ms",
    "max_load",
    "inter_cluster_spikes",
    "normalized_inter_cluster",
)
ALGORITHMS = ("greedy", "hco", "pso", "oracle-contiguous")

# name -> (layer sizes, aggregate spike count) of the reference applications
REFERENCE_WORKLOADS: Dict[str, Tuple[Tuple[int, ...], int]] = {
    "S_1000": ((400, 400, 100), 5_948_200),
    "S_2000": ((800, 400, 800), 45_807_200),
    "EdgeDet": ((4096, 1024, 1024, 1024), 22_780),
    "MLP-MNIST": ((784, 100, 10), 2_395_300),
}


@dataclass(frozen=True)
class Workload:
    """A named graph source: a ``.sng`` file or a synthetic topology."""

    name: str
    path: Optional[str] = None
    layers: Optional[Tuple[int, ...]] = None
    spikes_lo: int = 1
    spikes_hi: int = 50
    total_spikes: Optional[int] = None

    def __post_init__(self):
        if (self.path is None) == (self.layers is None):
            raise ValueError(f"workload {self.name!r} needs exactly one of 'graph' or 'layers'")

    @classmethod
    def reference(cls, name: str) -> "Workload":
        layers, total = REFERENCE_WORKLOADS[name]
        return cls(name=name, layers=layers, total_spikes=total)

    def build(self, seed: int = 0) -> SpikeGraph:
        if self.path is not None:
            return load_graph(self.path)
        spec = TopologySpec(
            tuple(self.layers),
            spikes_lo=self.spikes_lo,
            spikes_hi=self.spikes_hi,
            seed=seed,
            total_spikes=self.total_spikes,
        )
        return generate_feedforward(spec)


@dataclass
class ExperimentRecord:
    workload: str
    n: int
    synapses: int
    total_spikes: int
    algo: str
    k: int
    s: int
    seed: int
    wall_ms: Optional[float] = None
    max_load: Optional[int] = None
    inter_cluster_spikes: Optional[int] = None
    normalized_inter_cluster: Optional[float] = None
    error: Optional[str] = field(default=None, compare=False)

    def row(self) -> List[str]:
        out = []
        for f in fields(self)[: len(CSV_HEADER)]:
            value = getattr(self, f.name)
            if value is None:
                out.append("")
            elif f.name == "wall_ms":
                out.append(f"{value:.3f}")
            elif isinstance(value, float):
                out.append(format(value, ".10g"))
            else:
                out.append(str(value))
        return out


@dataclass
class MappingResult:
    partition: Partition
    report: CostReport
    wall_ms: float
    trace: Union[ClimbTrace, np.ndarray, None] = None


def run_algorithm(
    graph: SpikeGraph,
    hw: HardwareConfig,
    algo: str,
    seed: int = 0,
    max_iters: Optional[int] = None,
    pso: Optional[PsoConfig] = None,
) -> MappingResult:
    """Run one mapping algorithm; ``wall_ms`` covers the algorithm call only."""
    if algo not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algo!r}; choose from {', '.join(ALGORITHMS)}")
    hw.check_feasible(graph.n_neurons)
    trace = None
    t0 = time.perf_counter_ns()
    if algo == "greedy":
        partition = greedy_partition(graph, hw)
    elif algo == "hco":
        partition, trace = climb(graph, greedy_partition(graph, hw), hw, max_iters=max_iters)
    elif algo == "pso":
        cfg = pso or PsoConfig()
        cfg = replace(cfg, seed=seed)
        partition, trace = pso_partition(graph, hw, cfg)
    else:
        partition, _ = exhaustive_contiguous(graph, hw)
    wall_ms = (time.perf_counter_ns() - t0) / 1e6
    return MappingResult(partition, max_cost(graph, partition), wall_ms, trace)


def _open_csv(path):
    fresh = not os.path.exists(path) or os.path.getsize(path) == 0
    fh = open(path, "a", newline="")
    writer = csv.writer(fh, lineterminator="\n")
    if fresh:
        writer.writerow(CSV_HEADER)
        fh.flush()
    return fh, writer


def _record(name, graph, hw, algo, seed) -> ExperimentRecord:
    return ExperimentRecord(
        workload=name,
        n=graph.n_neurons,
        synapses=graph.n_synapses,
        total_spikes=graph.total_spikes,
        algo=algo,
        k=hw.crossbar_size,
        s=hw.crossbar_count,
        seed=seed,
    )


def run_experiment(
    workload: Union[Workload, SpikeGraph],
    algo: str,
    hw: Optional[HardwareConfig] = None,
    crossbar_size: int = 256,
    seed: int = 0,
    repetitions: int = 3,
    max_iters: Optional[int] = None,
    pso: Optional[PsoConfig] = None,
    csv_path=None,
    name: Optional[str] = None,
) -> List[ExperimentRecord]:
    """Time ``algo`` on a workload ``repetitions`` times.

    Synthetic workloads are generated with ``seed``, which also seeds the
    algorithm. When ``hw`` is omitted the crossbar count defaults to the
    minimum that fits plus two spares. Records are appended to ``csv_path``
    (if given) as they are produced.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    if isinstance(workload, SpikeGraph):
        graph, name = workload, name or "graph"
    else:
        graph, name = workload.build(seed), name or workload.name
    if hw is None:
        hw = HardwareConfig.with_headroom(graph.n_neurons, crossbar_size)
    records = []
    fh, writer = _open_csv(csv_path) if csv_path is not None else (None, None)
    try:
        for _ in range(repetitions):
            result = run_algorithm(graph, hw, algo, seed=seed, max_iters=max_iters, pso=pso)
            rec = _record(name, graph, hw, algo, seed)
            rec.wall_ms = result.wall_ms
            rec.max_load = result.report.max_load
            rec.inter_cluster_spikes = result.report.inter_cluster_spikes
            rec.normalized_inter_cluster = float(result.report.normalized_inter_cluster)
            records.append(rec)
            if writer is not None:
                writer.writerow(rec.row())
                fh.flush()
    finally:
        if fh is not None:
            fh.close()
    return records


# -- suites ----------------------------------------------------------------


@dataclass
class Suite:
    workloads: List[Tuple[Workload, Optional[int]]]
    algos: Sequence[str] = ("greedy", "hco", "pso")
    seeds: Sequence[int] = (0,)
    crossbar_size: int = 256
    repetitions: int = 3
    max_iters: Optional[int] = None
    pso: PsoConfig = field(default_factory=PsoConfig)

    @classmethod
    def from_dict(cls, data: dict, base_dir: str = ".") -> "Suite":
        workloads = []
        for entry in data.get("workload", []):
            entry = dict(entry)
            name = entry.pop("name")
            s = entry.pop("s", None)
            if entry.pop("reference", False):
                wl = Workload.reference(name)
            elif "graph" in entry:
                wl = Workload(name=name, path=os.path.join(base_dir, entry.pop("graph")))
            else:
                entry["layers"] = tuple(entry["layers"])
                wl = Workload(name=name, **entry)
            workloads.append((wl, s))
        if not workloads:
            raise ValueError("suite lists no workloads")
        algos = tuple(data.get("algos", ("greedy", "hco", "pso")))
        for a in algos:
            if a not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {a!r} in suite")
        pso_cfg = data.get("pso", {})
        pso = PsoConfig(
            swarm_size=pso_cfg.get("swarm", 50),
            iterations=pso_cfg.get("iters", 2000),
            capacity_penalty=pso_cfg.get("penalty"),
        )
        return cls(
            workloads=workloads,
            algos=algos,
            seeds=tuple(data.get("seeds", (0,))),
            crossbar_size=data.get("k", 256),
            repetitions=data.get("repetitions", 3),
            max_iters=data.get("hco", {}).get("max_iters"),
            pso=pso,
        )

    @classmethod
    def load(cls, path) -> "Suite":
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
        return cls.from_dict(data, base_dir=os.path.dirname(os.path.abspath(path)))


def _ratio(num: float, den: float) -> float:
    if den == 0:
        return 1.0 if num == 0 else math.inf
    return num / den


def summarize(records: Sequence[ExperimentRecord]) -> List[dict]:
    """Per-workload medians of wall time, means of spikes, and the two ratios."""
    out = []
    names = list(dict.fromkeys(r.workload for r in records))
    for name in names:
        rows = [r for r in records if r.workload == name and r.error is None]
        row = {"workload": name}
        if rows:
            row["n"] = rows[0].n
            row["s"] = rows[0].s
        for algo in ALGORITHMS:
            mine = [r for r in rows if r.algo == algo]
            if mine:
                row[f"{algo}_ms"] = statistics.median(r.wall_ms for r in mine)
                row[f"{algo}_spikes"] = statistics.fmean(r.inter_cluster_spikes for r in mine)
        if "pso_ms" in row and "hco_ms" in row:
            row["pso_over_hco_time"] = _ratio(row["pso_ms"], row["hco_ms"])
            row["hco_over_pso_spikes"] = _ratio(row["hco_spikes"], row["pso_spikes"])
        out.append(row)
    return out


def write_summary(summary: Sequence[dict], path) -> None:
    keys = list(dict.fromkeys(k for row in summary for k in row))
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        for row in summary:
            w.writerow({k: (format(v, ".6g") if isinstance(v, float) else v) for k, v in row.items()})


def bench_suite(suite: Union[Suite, str, os.PathLike], csv_path) -> Tuple[List[ExperimentRecord], List[dict]]:
    """Run every workload x algorithm x seed cell of ``suite``.

    A failing cell is logged, written as a row with empty metric columns and
    kept in the returned records with ``error`` set; the suite carries on.
    """
    if not isinstance(suite, Suite):
        suite = Suite.load(suite)
    records: List[ExperimentRecord] = []
    fh, writer = _open_csv(csv_path)
    try:
        for workload, s in suite.workloads:
            for seed in suite.seeds:
                try:
                    graph = workload.build(seed)
                except Exception as exc:  # noqa: BLE001 - recorded, suite continues
                    logger.error("workload %s seed %s: %s", workload.name, seed, exc)
                    for algo in suite.algos:
                        rec = ExperimentRecord(workload.name, 0, 0, 0, algo, suite.crossbar_size, s or 0, seed)
                        rec.error = str(exc)
                        records.append(rec)
                        writer.writerow(rec.row())
                    fh.flush()
                    continue
                if s is None:
                    hw = HardwareConfig.with_headroom(graph.n_neurons, suite.crossbar_size)
                else:
                    hw = HardwareConfig(suite.crossbar_size, s)
                for algo in suite.algos:
                    try:
                        recs = run_experiment(
                            graph,
                            algo,
                            hw=hw,
                            seed=seed,
                            repetitions=suite.repetitions,
                            max_iters=suite.max_iters,
                            pso=suite.pso,
                            name=workload.name,
                        )
                    except Exception as exc:  # noqa: BLE001 - recorded, suite continues
                        logger.error("%s/%s seed %s: %s", workload.name, algo, seed, exc)
                        rec = _record(workload.name, graph, hw, algo, seed)
                        rec.error = str(exc)
                        recs = [rec]
                    for rec in recs:
                        writer.writerow(rec.row())
                    fh.flush()
                    records.extend(recs)
    finally:
        fh.close()
    return records, summarize(records)
