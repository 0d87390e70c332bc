"""Spike-annotated workload graphs.

A workload is a directed graph over neurons. Every neuron carries a layer
tag and every synapse carries the number of spikes it transported during one
evaluation window. Neuron ids are dense integers ``0..n-1``; the canonical
neuron order is layer-major (layer ascending, id ascending within a layer).
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .exceptions import GraphFormatError, GraphValidationError

logger = logging.getLogger(__name__)

GRAPH_MAGIC = "snngraph"
GRAPH_VERSION = "v1"


class Neuron(NamedTuple):
    id: int
    layer: int


class Synapse(NamedTuple):
    src: int
    dst: int
    spikes: int


def _frozen(a, dtype=np.int64) -> np.ndarray:
    out = np.array(a, dtype=dtype, copy=True).reshape(-1)
    out.setflags(write=False)
    return out


class SpikeGraph:
    """Immutable spike-count weighted directed graph.

    Parameters
    ----------
    layers : array-like of int, shape (n_neurons,)
        Layer index of neuron ``i`` at position ``i``.
    src, dst : array-like of int, shape (n_synapses,)
        Synapse endpoints (neuron ids).
    spikes : array-like of int, shape (n_synapses,)
        Spike count carried by each synapse.

    Duplicate ``(src, dst)`` pairs are merged by summing their spike counts,
    and synapses are stored sorted by ``(src, dst)``.
    """

    def __init__(self, layers, src=(), dst=(), spikes=()):
        layers = _frozen(layers)
        src = np.asarray(src, dtype=np.int64).reshape(-1)
        dst = np.asarray(dst, dtype=np.int64).reshape(-1)
        spikes = np.asarray(spikes, dtype=np.int64).reshape(-1)
        n = layers.shape[0]
        if not (src.shape == dst.shape == spikes.shape):
            raise GraphValidationError("src, dst and spikes must have the same length")
        if n and layers.min() < 0:
            bad = int(np.flatnonzero(layers < 0)[0])
            raise GraphValidationError(f"neuron {bad} has negative layer {layers[bad]}")
        for name, ends in (("source", src), ("destination", dst)):
            bad = (ends < 0) | (ends >= n)
            if bad.any():
                i = int(np.flatnonzero(bad)[0])
                raise GraphValidationError(
                    f"synapse {i} references unknown {name} neuron {int(ends[i])}"
                )
        loops = src == dst
        if loops.any():
            i = int(np.flatnonzero(loops)[0])
            raise GraphValidationError(f"synapse {i} is a self-loop on neuron {int(src[i])}")
        if (spikes < 0).any():
            i = int(np.flatnonzero(spikes < 0)[0])
            raise GraphValidationError(
                f"synapse {i} ({int(src[i])}->{int(dst[i])}) has negative spike count {int(spikes[i])}"
            )

        if src.size:
            key = src * n + dst
            uniq, inverse = np.unique(key, return_inverse=True)
            if uniq.size != key.size:
                merged = np.zeros(uniq.size, dtype=np.int64)
                np.add.at(merged, inverse, spikes)
                spikes = merged
            else:
                spikes = spikes[np.argsort(key, kind="stable")]
            src, dst = uniq // n, uniq % n

        self._layers = layers
        self._src = _frozen(src)
        self._dst = _frozen(dst)
        self._spikes = _frozen(spikes)
        self._total = int(self._spikes.sum())

    # -- basic views -----------------------------------------------------
    @property
    def layers(self) -> np.ndarray:
        return self._layers

    @property
    def src(self) -> np.ndarray:
        return self._src

    @property
    def dst(self) -> np.ndarray:
        return self._dst

    @property
    def spikes(self) -> np.ndarray:
        return self._spikes

    @property
    def n_neurons(self) -> int:
        return int(self._layers.shape[0])

    @property
    def n_synapses(self) -> int:
        return int(self._src.shape[0])

    @property
    def total_spikes(self) -> int:
        return self._total

    @cached_property
    def order(self) -> np.ndarray:
        """Neuron ids in canonical layer-major order."""
        ids = np.arange(self.n_neurons)
        return _frozen(np.lexsort((ids, self._layers)))

    @cached_property
    def position(self) -> np.ndarray:
        """Inverse of :attr:`order`: ``position[id]`` is the neuron's rank."""
        pos = np.empty(self.n_neurons, dtype=np.int64)
        pos[self.order] = np.arange(self.n_neurons)
        return _frozen(pos)

    @property
    def neurons(self) -> list:
        return [Neuron(int(i), int(self._layers[i])) for i in self.order]

    @property
    def synapses(self) -> list:
        return [
            Synapse(int(a), int(b), int(w))
            for a, b, w in zip(self._src.tolist(), self._dst.tolist(), self._spikes.tolist())
        ]

    @cached_property
    def adjacency(self) -> "Adjacency":
        """CSR adjacency over synapses that carry at least one spike."""
        return Adjacency.from_graph(self)

    # -- comparisons -----------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, SpikeGraph):
            return NotImplemented
        return (
            np.array_equal(self._layers, other._layers)
            and np.array_equal(self._src, other._src)
            and np.array_equal(self._dst, other._dst)
            and np.array_equal(self._spikes, other._spikes)
        )

    __hash__ = None

    def __repr__(self):
        return (
            f"SpikeGraph(n_neurons={self.n_neurons}, n_synapses={self.n_synapses}, "
            f"total_spikes={self.total_spikes})"
        )


@dataclass(frozen=True)
class Adjacency:
    """Outgoing and incoming CSR lists, restricted to positive spike counts.

    Zero-spike synapses never contribute to any load, so dropping them keeps
    the sparse workloads (mostly silent synapses) cheap to sweep.
    """

    out_ptr: np.ndarray
    out_nbr: np.ndarray
    out_w: np.ndarray
    in_ptr: np.ndarray
    in_nbr: np.ndarray
    in_w: np.ndarray

    @classmethod
    def from_graph(cls, graph: SpikeGraph) -> "Adjacency":
        n = graph.n_neurons
        live = graph.spikes > 0
        src, dst, w = graph.src[live], graph.dst[live], graph.spikes[live]
        # synapses are already sorted by (src, dst)
        out_ptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=out_ptr[1:])
        by_dst = np.argsort(dst, kind="stable")
        in_ptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(dst, minlength=n), out=in_ptr[1:])
        return cls(
            out_ptr=_frozen(out_ptr),
            out_nbr=_frozen(dst),
            out_w=_frozen(w),
            in_ptr=_frozen(in_ptr),
            in_nbr=_frozen(src[by_dst]),
            in_w=_frozen(w[by_dst]),
        )

    def outgoing(self, v: int) -> Tuple[np.ndarray, np.ndarray]:
        a, b = self.out_ptr[v], self.out_ptr[v + 1]
        return self.out_nbr[a:b], self.out_w[a:b]

    def incoming(self, v: int) -> Tuple[np.ndarray, np.ndarray]:
        a, b = self.in_ptr[v], self.in_ptr[v + 1]
        return self.in_nbr[a:b], self.in_w[a:b]


# -- synthetic workloads ---------------------------------------------------


@dataclass(frozen=True)
class TopologySpec:
    """Fully connected feedforward topology with synthetic spike counts.

    Spike counts are drawn uniformly from ``[spikes_lo, spikes_hi]``. When
    ``total_spikes`` is given the draws are used as multinomial weights and
    exactly ``total_spikes`` spikes are scattered over the synapses instead,
    which lets a workload match a known aggregate spike count.
    """

    layer_sizes: Tuple[int, ...]
    spikes_lo: int = 1
    spikes_hi: int = 50
    seed: int = 0
    total_spikes: Optional[int] = None
    connectivity: str = "full"

    def __post_init__(self):
        sizes = tuple(int(x) for x in self.layer_sizes)
        object.__setattr__(self, "layer_sizes", sizes)
        if len(sizes) < 2:
            raise ValueError("a topology needs at least 2 layers")
        if any(x < 1 for x in sizes):
            raise ValueError(f"layer sizes must be positive, got {sizes}")
        if self.connectivity != "full":
            raise ValueError(f"unsupported connectivity {self.connectivity!r}")
        if not 0 <= self.spikes_lo <= self.spikes_hi:
            raise ValueError(
                f"need 0 <= spikes_lo <= spikes_hi, got [{self.spikes_lo}, {self.spikes_hi}]"
            )
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.total_spikes is not None and self.total_spikes < 0:
            raise ValueError("total_spikes must be non-negative")

    @property
    def n_neurons(self) -> int:
        return sum(self.layer_sizes)

    @property
    def n_synapses(self) -> int:
        sizes = self.layer_sizes
        return sum(a * b for a, b in zip(sizes, sizes[1:]))


def generate_feedforward(spec: TopologySpec) -> SpikeGraph:
    """Build a fully connected feedforward graph from ``spec``.

    Neuron ids are assigned layer by layer, so the canonical order is the
    identity. Identical specs yield identical graphs.
    """
    sizes = spec.layer_sizes
    layers = np.repeat(np.arange(len(sizes)), sizes)
    offsets = np.concatenate(([0], np.cumsum(sizes)))
    src_parts, dst_parts = [], []
    for i in range(len(sizes) - 1):
        a = np.arange(offsets[i], offsets[i + 1])
        b = np.arange(offsets[i + 1], offsets[i + 2])
        src_parts.append(np.repeat(a, b.size))
        dst_parts.append(np.tile(b, a.size))
    src = np.concatenate(src_parts)
    dst = np.concatenate(dst_parts)

    rng = np.random.default_rng(int(spec.seed))
    draws = rng.integers(spec.spikes_lo, spec.spikes_hi + 1, size=src.size, dtype=np.int64)
    if spec.total_spikes is None:
        spikes = draws
    else:
        mass = draws.sum()
        if mass == 0:
            if spec.total_spikes:
                raise ValueError("cannot scatter spikes when every synapse weight is zero")
            spikes = draws
        else:
            spikes = rng.multinomial(spec.total_spikes, draws / mass)
    return SpikeGraph(layers, src, dst, spikes)


# -- file format -----------------------------------------------------------


def save_graph(graph: SpikeGraph, path) -> None:
    """Write ``graph`` in the line-oriented ``snngraph v1`` text format."""
    order = graph.order
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"{GRAPH_MAGIC} {GRAPH_VERSION} {graph.n_neurons} {graph.n_synapses}\n")
        layers = graph.layers[order]
        fh.writelines(f"N {i} {l}\n" for i, l in zip(order.tolist(), layers.tolist()))
        chunk = 1 << 16
        src, dst, w = graph.src, graph.dst, graph.spikes
        for lo in range(0, graph.n_synapses, chunk):
            hi = lo + chunk
            fh.write(
                "".join(
                    f"S {a} {b} {c}\n"
                    for a, b, c in zip(src[lo:hi].tolist(), dst[lo:hi].tolist(), w[lo:hi].tolist())
                )
            )


def _ints(fields: Sequence[str], lineno: int, path) -> list:
    try:
        return [int(f, 10) for f in fields]
    except ValueError:
        raise GraphFormatError(f"{path}:{lineno}: expected decimal integers, got {' '.join(fields)!r}")


def load_graph(path) -> SpikeGraph:
    """Parse an ``snngraph v1`` file.

    Raises
    ------
    GraphFormatError
        Malformed header or record, or record counts disagreeing with the header.
    GraphValidationError
        Duplicate or non-contiguous neuron ids, dangling synapse endpoints,
        self-loops, negative spike counts.
    """
    header = None
    neuron_ids, neuron_layers = [], []
    syn_lines, syn_fields = [], []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, 1):
            fields = line.split()
            if not fields or fields[0].startswith("#"):
                continue
            tag = fields[0]
            if header is None:
                if tag != GRAPH_MAGIC or len(fields) != 4 or fields[1] != GRAPH_VERSION:
                    raise GraphFormatError(
                        f"{path}:{lineno}: expected header '{GRAPH_MAGIC} {GRAPH_VERSION} <n> <m>'"
                    )
                header = _ints(fields[2:], lineno, path)
            elif tag == "N":
                if len(fields) != 3:
                    raise GraphFormatError(f"{path}:{lineno}: neuron record needs 'N <id> <layer>'")
                nid, layer = _ints(fields[1:], lineno, path)
                neuron_ids.append(nid)
                neuron_layers.append(layer)
            elif tag == "S":
                if len(fields) != 4:
                    raise GraphFormatError(
                        f"{path}:{lineno}: synapse record needs 'S <src> <dst> <spikes>'"
                    )
                syn_lines.append(lineno)
                syn_fields.append(fields[1:])
            else:
                raise GraphFormatError(f"{path}:{lineno}: unknown record type {tag!r}")
    if header is None:
        raise GraphFormatError(f"{path}: missing header")
    n, m = header
    if len(neuron_ids) != n:
        raise GraphFormatError(f"{path}: header declares {n} neurons, found {len(neuron_ids)}")
    if len(syn_fields) != m:
        raise GraphFormatError(f"{path}: header declares {m} synapses, found {len(syn_fields)}")

    try:
        syn = np.array(syn_fields, dtype=np.int64).reshape(-1, 3)
    except ValueError:
        for lineno, fields in zip(syn_lines, syn_fields):
            _ints(fields, lineno, path)
        raise

    layers = np.full(n, -1, dtype=np.int64)
    seen = np.zeros(n, dtype=bool)
    for nid, layer in zip(neuron_ids, neuron_layers):
        if not 0 <= nid < n:
            raise GraphValidationError(f"{path}: neuron id {nid} outside the dense range [0, {n})")
        if seen[nid]:
            raise GraphValidationError(f"{path}: duplicate neuron id {nid}")
        if layer < 0:
            raise GraphValidationError(f"{path}: neuron {nid} has negative layer {layer}")
        seen[nid] = True
        layers[nid] = layer

    src, dst, spikes = syn[:, 0], syn[:, 1], syn[:, 2]
    for col, name in ((src, "source"), (dst, "destination")):
        bad = (col < 0) | (col >= n)
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise GraphValidationError(
                f"{path}:{syn_lines[i]}: synapse references unknown {name} neuron {int(col[i])}"
            )
    for mask, what in ((src == dst, "is a self-loop"), (spikes < 0, "has a negative spike count")):
        if mask.any():
            i = int(np.flatnonzero(mask)[0])
            raise GraphValidationError(
                f"{path}:{syn_lines[i]}: synapse {int(src[i])}->{int(dst[i])} {what}"
            )
    graph = SpikeGraph(layers, src, dst, spikes)
    if graph.n_synapses != m:
        logger.info("%s: merged %d duplicate synapses", os.fspath(path), m - graph.n_synapses)
    return graph
