"""Greedy sub-list construction.

One left-to-right sweep over the canonical neuron order. The open sub-list
grows until it reaches the crossbar size, or until its outgoing traffic
exceeds the mean per-crossbar load and enough spare slots (the margin) are
left to close it early without starving the remaining neurons.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List

import numpy as np

from .graph import SpikeGraph
from .partition import HardwareConfig, Partition, mean_load


@dataclass
class GreedyState:
    """Bookkeeping of the sweep; exposed for inspection and tests."""

    current_start: int
    margin: int
    mean: Fraction
    closed_boundaries: List[int] = field(default_factory=list)
    accumulations: int = 0


def running_load(graph: SpikeGraph, start: int, stop: int) -> int:
    """Spikes leaving canonical positions ``[start, stop)`` for anywhere else."""
    if not 0 <= start <= stop <= graph.n_neurons:
        raise IndexError(f"range [{start}, {stop}) outside [0, {graph.n_neurons})")
    pos = graph.position
    ps, pd = pos[graph.src], pos[graph.dst]
    out = (ps >= start) & (ps < stop) & ((pd < start) | (pd >= stop))
    return int(graph.spikes[out].sum())


def greedy_sweep(graph: SpikeGraph, hw: HardwareConfig) -> GreedyState:
    """Run the sweep and return its final state.

    The open sub-list's load is updated incrementally: appending neuron ``v``
    adds its spikes towards neurons outside the sub-list and removes the
    spikes the sub-list was sending to ``v``. Each live synapse is touched at
    most twice over the whole sweep.
    """
    n, k, s = graph.n_neurons, hw.crossbar_size, hw.crossbar_count
    hw.check_feasible(n)
    adj = graph.adjacency
    order, pos = graph.order, graph.position
    total = graph.total_spikes
    state = GreedyState(current_start=0, margin=k * s - n, mean=mean_load(graph, hw))

    load = 0
    for i in range(n):
        v = order[i]
        start = state.current_start
        out_nbr, out_w = adj.outgoing(v)
        in_nbr, in_w = adj.incoming(v)
        p = pos[out_nbr]
        q = pos[in_nbr]
        # sub-list before appending v is [start, i)
        load += int(out_w[(p < start) | (p >= i)].sum()) - int(in_w[(q >= start) & (q < i)].sum())
        state.accumulations += out_w.shape[0] + in_w.shape[0]

        if len(state.closed_boundaries) == s - 1 or i == n - 1:
            continue
        length = i - start + 1
        if length == k:
            cut = True
        else:
            # load > mean, compared exactly as integers
            cut = load * s > total and state.margin >= k - length
        if cut:
            state.margin -= k - length
            state.closed_boundaries.append(i + 1)
            state.current_start = i + 1
            load = 0
    return state


def partition_from_state(graph: SpikeGraph, hw: HardwareConfig, state: GreedyState) -> Partition:
    cuts = state.closed_boundaries
    pad = [graph.n_neurons] * (hw.crossbar_count - 1 - len(cuts))
    return Partition(graph.order, np.array(cuts + pad, dtype=np.int64))


def greedy_partition(graph: SpikeGraph, hw: HardwareConfig) -> Partition:
    """Cut the canonical order into at most ``s`` capacity-respecting sub-lists.

    Raises
    ------
    InfeasibleError
        If the graph has more neurons than the hardware has slots.
    """
    return partition_from_state(graph, hw, greedy_sweep(graph, hw))
