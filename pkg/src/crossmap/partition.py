"""Hardware model, partition representation and traffic cost.

A partition is stored as a linear neuron order cut by ``s - 1`` boundaries,
so cluster ``j`` holds ``order[b[j-1]:b[j]]`` with ``b[-1] = 0`` and
``b[s-1] = n``. Trailing clusters may be empty; interior ones may not.

The load of a cluster is the number of spikes it pushes onto the shared
interconnect: the spike counts of synapses whose source lies inside the
cluster and whose destination lies outside it.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, NamedTuple, Tuple

import numpy as np

from .exceptions import GraphFormatError, InfeasibleError
from .graph import SpikeGraph

MAP_MAGIC = "snnmap"
MAP_VERSION = "v1"
COST_CSV_HEADER = ("max_load", "inter_cluster_spikes", "normalized_inter_cluster")


@dataclass(frozen=True)
class HardwareConfig:
    """``crossbar_count`` crossbars of ``crossbar_size`` neurons each."""

    crossbar_size: int
    crossbar_count: int

    def __post_init__(self):
        if int(self.crossbar_size) < 1 or int(self.crossbar_count) < 1:
            raise ValueError(
                f"crossbar size and count must be >= 1, got k={self.crossbar_size}, "
                f"s={self.crossbar_count}"
            )

    @property
    def capacity(self) -> int:
        return self.crossbar_size * self.crossbar_count

    @classmethod
    def with_headroom(cls, n_neurons: int, crossbar_size: int, extra: int = 2) -> "HardwareConfig":
        """Smallest crossbar count that fits ``n_neurons``, plus ``extra`` spares."""
        return cls(crossbar_size, max(1, math.ceil(n_neurons / crossbar_size)) + extra)

    def check_feasible(self, n_neurons: int) -> None:
        if n_neurons > self.capacity:
            raise InfeasibleError(
                f"{n_neurons} neurons do not fit on {self.crossbar_count} crossbars of "
                f"{self.crossbar_size} (capacity {self.capacity})"
            )


class Partition:
    """Neuron order plus cluster boundaries.

    Parameters
    ----------
    order : array-like of int
        Neuron ids in the working linear order.
    boundaries : array-like of int, length ``n_clusters - 1``
        Cut positions into ``order``.
    """

    def __init__(self, order, boundaries):
        self.order = np.array(order, dtype=np.int64).reshape(-1)
        self.boundaries = np.array(boundaries, dtype=np.int64).reshape(-1)
        self.order.setflags(write=False)
        self.boundaries.setflags(write=False)

    @classmethod
    def from_assignment(cls, labels, n_clusters: int, order=None) -> "Partition":
        """Build a partition from a free neuron -> cluster map.

        Empty clusters are moved to the end (non-empty clusters keep their
        relative numbering). Within a cluster neurons follow ``order``, or
        ascending id when no order is given.
        """
        labels = np.asarray(labels, dtype=np.int64).reshape(-1)
        if labels.size and (labels.min() < 0 or labels.max() >= n_clusters):
            raise ValueError(f"cluster labels must lie in [0, {n_clusters})")
        if order is None:
            order = np.arange(labels.size)
        order = np.asarray(order, dtype=np.int64)
        sizes = np.bincount(labels, minlength=n_clusters)
        used = np.flatnonzero(sizes)
        relabel = np.zeros(n_clusters, dtype=np.int64)
        relabel[used] = np.arange(used.size)
        compact = relabel[labels]
        new_order = order[np.argsort(compact[order], kind="stable")]
        sizes = np.bincount(compact, minlength=n_clusters)
        return cls(new_order, np.cumsum(sizes)[:-1])

    @property
    def n_neurons(self) -> int:
        return int(self.order.shape[0])

    @property
    def n_clusters(self) -> int:
        return int(self.boundaries.shape[0]) + 1

    @property
    def edges(self) -> np.ndarray:
        """``[0, b_1, ..., b_{s-1}, n]``."""
        return np.concatenate(([0], self.boundaries, [self.n_neurons]))

    @property
    def sizes(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def labels(self) -> np.ndarray:
        """Cluster index of every neuron, indexed by neuron id."""
        out = np.empty(self.n_neurons, dtype=np.int64)
        out[self.order] = np.repeat(np.arange(self.n_clusters), self.sizes)
        return out

    def cluster(self, j: int) -> np.ndarray:
        e = self.edges
        return self.order[e[j] : e[j + 1]]

    def clusters(self) -> List[np.ndarray]:
        return [self.cluster(j) for j in range(self.n_clusters)]

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return np.array_equal(self.order, other.order) and np.array_equal(
            self.boundaries, other.boundaries
        )

    __hash__ = None

    def __repr__(self):
        return f"Partition(n_neurons={self.n_neurons}, sizes={self.sizes.tolist()})"


@dataclass(frozen=True)
class CostReport:
    cluster_loads: Tuple[int, ...]
    max_load: int
    inter_cluster_spikes: int
    normalized_inter_cluster: Fraction

    @classmethod
    def from_loads(cls, loads, total_spikes: int) -> "CostReport":
        loads = tuple(int(x) for x in loads)
        inter = sum(loads)
        norm = Fraction(inter, total_spikes) if total_spikes else Fraction(0)
        return cls(loads, max(loads, default=0), inter, norm)

    @property
    def objective(self) -> Tuple[int, int]:
        """Lexicographic key minimized by the hill climber."""
        return (self.max_load, self.inter_cluster_spikes)

    def csv_row(self) -> Tuple[str, str, str]:
        return (
            str(self.max_load),
            str(self.inter_cluster_spikes),
            format(float(self.normalized_inter_cluster), ".10g"),
        )


def loads_from_labels(graph: SpikeGraph, labels, n_clusters: int) -> np.ndarray:
    """Per-cluster outgoing crossing traffic for a neuron -> cluster map."""
    labels = np.asarray(labels, dtype=np.int64)
    ls, ld = labels[graph.src], labels[graph.dst]
    crossing = ls != ld
    loads = np.zeros(n_clusters, dtype=np.int64)
    np.add.at(loads, ls[crossing], graph.spikes[crossing])
    return loads


def cluster_load(graph: SpikeGraph, partition: Partition, cluster: int) -> int:
    if not 0 <= cluster < partition.n_clusters:
        raise IndexError(f"cluster {cluster} out of range [0, {partition.n_clusters})")
    members = np.zeros(graph.n_neurons, dtype=bool)
    members[partition.cluster(cluster)] = True
    out = members[graph.src] & ~members[graph.dst]
    return int(graph.spikes[out].sum())


def max_cost(graph: SpikeGraph, partition: Partition) -> CostReport:
    loads = loads_from_labels(graph, partition.labels, partition.n_clusters)
    return CostReport.from_loads(loads, graph.total_spikes)


def mean_load(graph: SpikeGraph, hw: HardwareConfig) -> Fraction:
    """Average spikes per crossbar, the greedy sweep's early-cut threshold."""
    return Fraction(graph.total_spikes, hw.crossbar_count)


class Violation(NamedTuple):
    kind: str
    message: str


def validate(graph: SpikeGraph, partition: Partition, hw: HardwareConfig) -> List[Violation]:
    """List every invariant ``partition`` breaks; an empty list means valid."""
    out: List[Violation] = []
    n, s, k = graph.n_neurons, hw.crossbar_count, hw.crossbar_size
    order, b = partition.order, partition.boundaries

    if b.shape[0] != s - 1:
        out.append(
            Violation("cluster_count", f"expected {s - 1} boundaries for {s} crossbars, got {b.shape[0]}")
        )
    m = order.shape[0]
    edges = np.concatenate(([0], b, [m]))
    if (np.diff(edges) < 0).any():
        out.append(Violation("boundary_disorder", f"boundaries {b.tolist()} are not ordered within [0, {m}]"))
    else:
        sizes = np.diff(edges)
        for j in np.flatnonzero(sizes > k):
            out.append(
                Violation("capacity_exceeded", f"cluster {j} holds {sizes[j]} neurons, capacity is {k}")
            )
        nonempty = np.flatnonzero(sizes)
        if nonempty.size:
            for j in np.flatnonzero(sizes[: nonempty[-1]] == 0):
                out.append(Violation("empty_cluster", f"interior cluster {j} is empty"))

    unknown = order[(order < 0) | (order >= n)]
    for v in np.unique(unknown):
        out.append(Violation("unknown_neuron", f"neuron {v} is not in the graph"))
    known = order[(order >= 0) & (order < n)]
    counts = np.bincount(known, minlength=n)
    for v in np.flatnonzero(counts > 1):
        out.append(Violation("duplicate_assignment", f"neuron {v} is assigned {counts[v]} times"))
    for v in np.flatnonzero(counts == 0):
        out.append(Violation("missing_neuron", f"neuron {v} is not assigned to any cluster"))
    return out


# -- mapping file ----------------------------------------------------------


def save_mapping(partition: Partition, path) -> None:
    labels = partition.labels
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"{MAP_MAGIC} {MAP_VERSION} {partition.n_neurons} {partition.n_clusters}\n")
        fh.writelines(f"M {i} {c}\n" for i, c in enumerate(labels.tolist()))


def load_mapping(path, order=None) -> Partition:
    """Read an ``snnmap v1`` file back into a :class:`Partition`."""
    header = None
    labels = None
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, 1):
            fields = line.split()
            if not fields or fields[0].startswith("#"):
                continue
            try:
                if header is None:
                    if len(fields) != 4 or fields[:2] != [MAP_MAGIC, MAP_VERSION]:
                        raise GraphFormatError(f"{path}:{lineno}: expected 'snnmap v1 <n> <s>' header")
                    header = (int(fields[2]), int(fields[3]))
                    labels = np.full(header[0], -1, dtype=np.int64)
                    continue
                if fields[0] != "M" or len(fields) != 3:
                    raise GraphFormatError(f"{path}:{lineno}: expected 'M <neuron> <cluster>'")
                v, c = int(fields[1]), int(fields[2])
            except ValueError as exc:
                if isinstance(exc, GraphFormatError):
                    raise
                raise GraphFormatError(f"{path}:{lineno}: expected decimal integers")
            n, s = header
            if not 0 <= v < n or not 0 <= c < s:
                raise GraphFormatError(f"{path}:{lineno}: neuron {v} / cluster {c} out of range")
            if labels[v] != -1:
                raise GraphFormatError(f"{path}:{lineno}: neuron {v} mapped twice")
            labels[v] = c
    if header is None:
        raise GraphFormatError(f"{path}: missing header")
    missing = np.flatnonzero(labels < 0)
    if missing.size:
        raise GraphFormatError(f"{path}: neuron {missing[0]} has no mapping")
    return Partition.from_assignment(labels, header[1], order=order)


def write_cost_csv(report: CostReport, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COST_CSV_HEADER)
        w.writerow(report.csv_row())
