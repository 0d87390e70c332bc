"""Steepest-descent refinement of contiguous partitions.

A move shifts one boundary by one position, which transfers exactly one
neuron between two adjacent clusters. Every iteration scores all admissible
moves and applies the best one if it strictly improves the objective
``(max_load, inter_cluster_spikes)``. Only the two clusters touched by a
move change load, so candidates are scored from the moved neuron's synapses
alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, NamedTuple, Optional, Tuple

import numpy as np

from .graph import SpikeGraph
from .greedy import greedy_partition
from .partition import HardwareConfig, Partition, max_cost

LEFT = -1
RIGHT = 1

LOCAL_MINIMUM = "local_minimum"
ITERATION_CAP = "iteration_cap"


class Move(NamedTuple):
    """Shift boundary ``boundary_index`` one slot ``LEFT`` or ``RIGHT``.

    ``LEFT`` hands the last neuron of cluster ``boundary_index`` to the next
    cluster, ``RIGHT`` pulls the first neuron of the next cluster back.
    """

    boundary_index: int
    direction: int

    def inverse(self) -> "Move":
        return Move(self.boundary_index, -self.direction)

    def apply(self, partition: Partition) -> Partition:
        b = partition.boundaries.copy()
        b[self.boundary_index] += self.direction
        return Partition(partition.order, b)


@dataclass
class ClimbTrace:
    iterations: int = 0
    initial: Tuple[int, int] = (0, 0)
    cost_sequence: List[Tuple[int, int]] = field(default_factory=list)
    moves: List[Move] = field(default_factory=list)
    terminated_by: str = LOCAL_MINIMUM

    @property
    def final(self) -> Tuple[int, int]:
        return self.cost_sequence[-1] if self.cost_sequence else self.initial


def _admissible(sizes: np.ndarray, k: int) -> bool:
    if sizes.max(initial=0) > k or sizes.min(initial=0) < 0:
        return False
    nonempty = np.flatnonzero(sizes)
    return nonempty.size == 0 or nonempty[-1] + 1 == nonempty.size


def _moved_sizes(sizes: np.ndarray, move: Move) -> np.ndarray:
    j = move.boundary_index
    out = sizes.copy()
    out[j] += move.direction
    out[j + 1] -= move.direction
    return out


def neighborhood(partition: Partition, hw: HardwareConfig) -> List[Move]:
    """All admissible single-boundary shifts, in tie-break order."""
    sizes = partition.sizes
    moves = []
    for j in range(partition.n_clusters - 1):
        for d in (LEFT, RIGHT):
            m = Move(j, d)
            if _admissible(_moved_sizes(sizes, m), hw.crossbar_size):
                moves.append(m)
    return moves


def _transfer(adj, labels: np.ndarray, loads: np.ndarray, v: int, a: int, b: int) -> Tuple[int, int]:
    """Loads of clusters ``a`` and ``b`` after moving neuron ``v`` from ``a`` to ``b``."""
    out_nbr, out_w = adj.outgoing(v)
    in_nbr, in_w = adj.incoming(v)
    lo = labels[out_nbr]
    li = labels[in_nbr]
    out_total = int(out_w.sum())
    load_a = loads[a] - (out_total - int(out_w[lo == a].sum())) + int(in_w[li == a].sum())
    load_b = loads[b] + (out_total - int(out_w[lo == b].sum())) - int(in_w[li == b].sum())
    return load_a, load_b


def climb(
    graph: SpikeGraph,
    start: Partition,
    hw: HardwareConfig,
    max_iters: Optional[int] = None,
    callback: Optional[Callable[[Partition, np.ndarray], None]] = None,
) -> Tuple[Partition, ClimbTrace]:
    """Hill-climb from ``start`` until no move strictly improves the objective.

    Parameters
    ----------
    max_iters : int, optional
        Cap on accepted moves, ``10 * n`` by default.
    callback : callable, optional
        Called as ``callback(partition, cluster_loads)`` after each accepted
        move with the incrementally maintained loads.
    """
    n = graph.n_neurons
    if max_iters is None:
        max_iters = 10 * n
    if max_iters < 1:
        raise ValueError("max_iters must be positive")
    adj = graph.adjacency
    k = hw.crossbar_size
    order = start.order
    bounds = start.boundaries.copy()
    labels = start.labels
    sizes = start.sizes
    loads = np.array(max_cost(graph, start).cluster_loads, dtype=np.int64)
    current = (int(loads.max(initial=0)), int(loads.sum()))
    trace = ClimbTrace(initial=current)

    while trace.iterations < max_iters:
        best = None
        for j in range(bounds.shape[0]):
            for d in (LEFT, RIGHT):
                move = Move(j, d)
                new_sizes = _moved_sizes(sizes, move)
                if not _admissible(new_sizes, k):
                    continue
                if d == LEFT:
                    v, a, b = order[bounds[j] - 1], j, j + 1
                else:
                    v, a, b = order[bounds[j]], j + 1, j
                load_a, load_b = _transfer(adj, labels, loads, v, a, b)
                trial = loads.copy()
                trial[a], trial[b] = load_a, load_b
                obj = (int(trial.max()), int(trial.sum()))
                if obj < current and (best is None or obj < best[0]):
                    best = (obj, move, v, b, trial, new_sizes)
        if best is None:
            break
        current, move, v, b, loads, sizes = best
        bounds[move.boundary_index] += move.direction
        labels[v] = b
        trace.iterations += 1
        trace.cost_sequence.append(current)
        trace.moves.append(move)
        if callback is not None:
            callback(Partition(order, bounds), loads.copy())
    else:
        trace.terminated_by = ITERATION_CAP
    return Partition(order, bounds), trace


def hco_partition(
    graph: SpikeGraph, hw: HardwareConfig, max_iters: Optional[int] = None
) -> Tuple[Partition, ClimbTrace]:
    """Greedy sub-lists followed by hill climbing."""
    return climb(graph, greedy_partition(graph, hw), hw, max_iters=max_iters)
