"""Brute-force references for small instances.

Nothing here is clever on purpose: costs are recounted synapse by synapse
and optima come from full enumeration.
"""

from __future__ import annotations

import itertools
import math
from typing import Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .exceptions import InstanceTooLargeError
from .graph import SpikeGraph
from .partition import CostReport, HardwareConfig, Partition

MAX_PLACEMENTS = 10**6
MAX_ASSIGNMENTS = 10**7


def recount_cost(
    graph: SpikeGraph,
    assignment: Union[Sequence[int], Mapping[int, int], np.ndarray],
    n_clusters: Optional[int] = None,
) -> CostReport:
    """Per-cluster outgoing crossing traffic by a plain loop over synapses."""
    cluster_of = {}
    for v in range(graph.n_neurons):
        try:
            c = int(assignment[v])
        except (KeyError, IndexError):
            raise ValueError(f"neuron {v} is not mapped to any cluster")
        if c < 0:
            raise ValueError(f"neuron {v} is mapped to invalid cluster {c}")
        cluster_of[v] = c
    if n_clusters is None:
        n_clusters = max(cluster_of.values(), default=-1) + 1
    loads = [0] * n_clusters
    for src, dst, spikes in zip(graph.src.tolist(), graph.dst.tolist(), graph.spikes.tolist()):
        if cluster_of[src] != cluster_of[dst]:
            loads[cluster_of[src]] += spikes
    return CostReport.from_loads(loads, graph.total_spikes)


def count_placements(n: int, s: int) -> int:
    """Boundary vectors with non-empty leading clusters and empty trailing ones."""
    if n == 0:
        return 1
    return sum(math.comb(n - 1, j - 1) for j in range(1, min(s, n) + 1))


def exhaustive_contiguous(graph: SpikeGraph, hw: HardwareConfig) -> Tuple[Partition, CostReport]:
    """Best contiguous partition of the canonical order.

    Minimizes ``(max_load, inter_cluster_spikes)``; ties go to the
    lexicographically smallest boundary vector.
    """
    n, k, s = graph.n_neurons, hw.crossbar_size, hw.crossbar_count
    hw.check_feasible(n)
    total = count_placements(n, s)
    if total > MAX_PLACEMENTS:
        raise InstanceTooLargeError(f"{total} boundary placements exceed the cap of {MAX_PLACEMENTS}")
    order = graph.order
    best = None
    for used in range(1, min(s, max(n, 1)) + 1):
        for cuts in itertools.combinations(range(1, n), used - 1):
            edges = (0,) + cuts + (n,)
            if any(b - a > k for a, b in zip(edges, edges[1:])):
                continue
            bounds = cuts + (n,) * (s - used)
            assignment = {}
            for j, (a, b) in enumerate(zip(edges, edges[1:])):
                for p in range(a, b):
                    assignment[int(order[p])] = j
            report = recount_cost(graph, assignment, s)
            key = (report.objective, bounds)
            if best is None or key < best[0]:
                best = (key, bounds, report)
    _, bounds, report = best
    return Partition(order, list(bounds)), report


def exhaustive_assignment(graph: SpikeGraph, hw: HardwareConfig) -> Tuple[np.ndarray, CostReport]:
    """Capacity-feasible free assignment with the fewest inter-cluster spikes.

    Assignments are enumerated lexicographically (neuron 0 most significant)
    and the first minimum wins.
    """
    n, k, s = graph.n_neurons, hw.crossbar_size, hw.crossbar_count
    hw.check_feasible(n)
    if s**n > MAX_ASSIGNMENTS:
        raise InstanceTooLargeError(f"{s}^{n} assignments exceed the cap of {MAX_ASSIGNMENTS}")
    weights = s ** np.arange(n - 1, -1, -1, dtype=np.int64)
    best_code, best_cost = None, None
    chunk = 1 << 16
    for lo in range(0, s**n, chunk):
        codes = np.arange(lo, min(lo + chunk, s**n), dtype=np.int64)
        digits = (codes[:, None] // weights[None, :]) % s
        sizes = np.stack([(digits == c).sum(axis=1) for c in range(s)], axis=1)
        feasible = (sizes <= k).all(axis=1)
        crossing = (digits[:, graph.src] != digits[:, graph.dst]) @ graph.spikes
        crossing = np.where(feasible, crossing, np.iinfo(np.int64).max)
        i = int(np.argmin(crossing))
        if feasible[i] and (best_cost is None or crossing[i] < best_cost):
            best_code, best_cost = int(codes[i]), int(crossing[i])
    labels = (best_code // weights) % s
    return labels, recount_cost(graph, labels, s)
