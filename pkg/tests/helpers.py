"""Graph builders and hypothesis strategies shared by the tests."""

import numpy as np
from hypothesis import strategies as st

from crossmap.graph import SpikeGraph
from crossmap.partition import HardwareConfig, Partition


def chain(*weights, layered=True):
    """Path graph 0 -> 1 -> ... with the given spike counts."""
    n = len(weights) + 1
    layers = np.arange(n) if layered else np.zeros(n)
    return SpikeGraph(layers, np.arange(n - 1), np.arange(1, n), weights)


def random_graph(rng, n, density=0.3, max_spikes=20, n_layers=3):
    layers = rng.integers(0, n_layers, size=n)
    src, dst = np.nonzero(rng.random((n, n)) < density)
    keep = src != dst
    src, dst = src[keep], dst[keep]
    spikes = rng.integers(0, max_spikes + 1, size=src.size)
    return SpikeGraph(layers, src, dst, spikes)


def random_hardware(rng, n, k_lo=1, k_hi=None):
    k = int(rng.integers(k_lo, (k_hi or max(n, 1)) + 1))
    s_min = max(1, -(-n // k))
    s = int(rng.integers(s_min, s_min + 3))
    return HardwareConfig(k, s)


def random_contiguous(rng, graph, hw):
    """Random valid contiguous partition; trailing clusters may stay empty."""
    n, k, s = graph.n_neurons, hw.crossbar_size, hw.crossbar_count
    used = int(rng.integers(max(1, -(-n // k)), min(s, max(n, 1)) + 1))
    sizes = np.ones(used, dtype=np.int64)
    # hand out the remaining neurons one at a time to clusters that still have room
    for _ in range(n - used):
        room = np.flatnonzero(sizes < k)
        sizes[rng.choice(room)] += 1
    cuts = np.cumsum(sizes)[:-1]
    bounds = np.concatenate((cuts, np.full(s - used, n))).astype(int)
    return Partition(graph.order, bounds)


@st.composite
def graphs(draw, max_neurons=12, max_spikes=30):
    n = draw(st.integers(1, max_neurons))
    layers = draw(st.lists(st.integers(0, 3), min_size=n, max_size=n))
    pairs = draw(
        st.lists(
            st.tuples(st.integers(0, n - 1), st.integers(0, n - 1), st.integers(0, max_spikes)),
            max_size=3 * n,
        )
    )
    pairs = [p for p in pairs if p[0] != p[1]]
    src = [p[0] for p in pairs]
    dst = [p[1] for p in pairs]
    w = [p[2] for p in pairs]
    return SpikeGraph(layers, src, dst, w)


@st.composite
def graphs_and_hardware(draw, max_neurons=12):
    g = draw(graphs(max_neurons=max_neurons))
    n = g.n_neurons
    k = draw(st.integers(1, n))
    s_min = -(-n // k)
    s = draw(st.integers(s_min, s_min + 2))
    return g, HardwareConfig(k, s)
