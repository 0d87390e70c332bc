"""Particle swarm baseline over free neuron-to-crossbar assignments.

Each particle holds one real coordinate per neuron; flooring and clamping it
to ``[0, s)`` yields the neuron's crossbar. Fitness is the inter-cluster
spike count plus a penalty per neuron above crossbar capacity. The best
assignment found is repaired to satisfy capacity strictly before it is
returned.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numba
import numpy as np
import scipy.sparse as sp

from .graph import SpikeGraph
from .partition import HardwareConfig, Partition

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PsoConfig:
    swarm_size: int = 50
    iterations: int = 2000
    inertia: float = 0.7298
    cognitive: float = 1.49618
    social: float = 1.49618
    capacity_penalty: Optional[float] = None
    seed: Optional[int] = 0

    def __post_init__(self):
        if self.swarm_size < 2:
            raise ValueError("swarm_size must be >= 2")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.capacity_penalty is not None and self.capacity_penalty < 0:
            raise ValueError("capacity_penalty must be non-negative")
        if self.seed is not None and not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def default_penalty(graph: SpikeGraph) -> float:
    """Largest spike traffic incident to any single neuron, plus one.

    Moving one neuron changes the crossing traffic by at most its incident
    traffic, so at this price an over-full crossbar never pays for itself.
    """
    if graph.n_neurons == 0:
        return 1.0
    n = graph.n_neurons
    degree = np.bincount(graph.src, weights=graph.spikes, minlength=n)
    degree += np.bincount(graph.dst, weights=graph.spikes, minlength=n)
    return float(degree.max()) + 1.0


def decode(position, n_clusters: int) -> np.ndarray:
    """Crossbar index per neuron: ``clamp(floor(x), 0, s - 1)``."""
    return np.clip(np.floor(position), 0, n_clusters - 1).astype(np.int64)


@numba.njit(cache=True, nogil=True)
def _crossing(assign_t, src, dst, w):
    # assign_t is (n_neurons, n_particles): one synapse read serves the whole swarm
    out = np.zeros(assign_t.shape[1], dtype=np.int64)
    for e in range(src.shape[0]):
        a = assign_t[src[e]]
        b = assign_t[dst[e]]
        we = w[e]
        for p in range(out.shape[0]):
            if a[p] != b[p]:
                out[p] += we
    return out


class _Fitness:
    """Vectorized swarm fitness over the graph's live synapses."""

    def __init__(self, graph: SpikeGraph, hw: HardwareConfig, penalty: float):
        live = graph.spikes > 0
        self.src = np.ascontiguousarray(graph.src[live])
        self.dst = np.ascontiguousarray(graph.dst[live])
        self.w = np.ascontiguousarray(graph.spikes[live])
        self.k = hw.crossbar_size
        self.s = hw.crossbar_count
        self.penalty = penalty

    def crossing(self, assign: np.ndarray) -> np.ndarray:
        return _crossing(np.ascontiguousarray(assign.T), self.src, self.dst, self.w)

    def overflow(self, assign: np.ndarray) -> np.ndarray:
        p = assign.shape[0]
        flat = assign + self.s * np.arange(p)[:, None]
        sizes = np.bincount(flat.ravel(), minlength=p * self.s).reshape(p, self.s)
        return np.maximum(sizes - self.k, 0).sum(axis=1)

    def __call__(self, assign: np.ndarray) -> np.ndarray:
        return self.crossing(assign) + self.penalty * self.overflow(assign)


def repair(graph: SpikeGraph, labels: np.ndarray, hw: HardwareConfig) -> np.ndarray:
    """Move neurons out of over-full crossbars until every crossbar fits.

    Each step moves the single neuron (out of the lowest-indexed over-full
    crossbar) whose relocation to a crossbar with free slots adds the fewest
    inter-cluster spikes.
    """
    k, s = hw.crossbar_size, hw.crossbar_count
    hw.check_feasible(graph.n_neurons)
    labels = np.array(labels, dtype=np.int64)
    sizes = np.bincount(labels, minlength=s)
    if sizes.max(initial=0) <= k:
        return labels
    n = graph.n_neurons
    w = sp.csr_matrix((graph.spikes, (graph.src, graph.dst)), shape=(n, n), dtype=np.int64)
    sym = (w + w.T).tocsr()
    while sizes.max() > k:
        c = int(np.flatnonzero(sizes > k)[0])
        members = np.flatnonzero(labels == c)
        onehot = sp.csr_matrix(
            (np.ones(n, dtype=np.int64), (np.arange(n), labels)), shape=(n, s)
        )
        conn = (sym[members] @ onehot).toarray()
        # added crossing spikes when moving member i to crossbar t
        delta = conn[:, [c]] - conn
        delta[:, sizes >= k] = np.iinfo(np.int64).max
        i, t = np.unravel_index(np.argmin(delta), delta.shape)
        labels[members[i]] = t
        sizes[c] -= 1
        sizes[t] += 1
    return labels


def pso_partition(
    graph: SpikeGraph, hw: HardwareConfig, cfg: PsoConfig = PsoConfig()
) -> Tuple[Partition, np.ndarray]:
    """Global-best PSO minimizing inter-cluster spikes.

    Returns the repaired best assignment (as a :class:`Partition` whose
    clusters follow the canonical order internally) and the global-best
    fitness after every iteration.
    """
    n, s = graph.n_neurons, hw.crossbar_count
    hw.check_feasible(n)
    rng = np.random.default_rng(cfg.seed)
    penalty = default_penalty(graph) if cfg.capacity_penalty is None else cfg.capacity_penalty
    fitness = _Fitness(graph, hw, penalty)
    shape = (cfg.swarm_size, n)

    x = rng.uniform(0.0, s, size=shape)
    v = rng.uniform(-1.0, 1.0, size=shape)
    pbest = x.copy()
    pbest_fit = fitness(decode(x, s))
    g = int(np.argmin(pbest_fit))
    trace = np.empty(cfg.iterations, dtype=np.float64)

    for it in range(cfg.iterations):
        r1 = rng.random(shape)
        r2 = rng.random(shape)
        v = cfg.inertia * v + cfg.cognitive * r1 * (pbest - x) + cfg.social * r2 * (pbest[g] - x)
        x = x + v
        fit = fitness(decode(x, s))
        better = fit < pbest_fit
        pbest[better] = x[better]
        pbest_fit[better] = fit[better]
        g = int(np.argmin(pbest_fit))
        trace[it] = pbest_fit[g]

    best = decode(pbest[g], s)
    fixed = repair(graph, best, hw)
    if not np.array_equal(best, fixed):
        logger.debug("repair moved %d neurons", int((best != fixed).sum()))
    return Partition.from_assignment(fixed, s, order=graph.order), trace
