"""Input coercion shared by the estimators."""

from __future__ import annotations

import numbers

import numpy as np
import scipy.sparse as sp
from sklearn.utils import check_array

from .graph import SpikeGraph
from .partition import HardwareConfig


def check_graph(X) -> SpikeGraph:
    """Accept a :class:`SpikeGraph` or a square spike-count matrix.

    ``X[i, j]`` is read as the spike count on synapse ``i -> j``. Matrices
    carry no layer information, so every neuron lands in layer 0 and the
    canonical order is plain id order.
    """
    if isinstance(X, SpikeGraph):
        return X
    X = check_array(X, accept_sparse=["csr", "csc", "coo"], dtype=None, ensure_min_samples=0)
    if X.shape[0] != X.shape[1]:
        raise ValueError(f"expected a square spike-count matrix, got shape {X.shape}")
    coo = sp.coo_matrix(X)
    data = coo.data
    if data.size and not np.issubdtype(data.dtype, np.integer):
        if not np.all(np.mod(data, 1) == 0):
            raise ValueError("spike counts must be integers")
    keep = data != 0
    row, col, data = coo.row[keep], coo.col[keep], data[keep].astype(np.int64)
    if (row == col).any():
        raise ValueError("spike-count matrix must have a zero diagonal (no self-loops)")
    if (data < 0).any():
        raise ValueError("spike counts must be non-negative")
    return SpikeGraph(np.zeros(X.shape[0], dtype=np.int64), row, col, data)


def check_hardware(crossbar_size, crossbar_count, n_neurons: int) -> HardwareConfig:
    """Build the hardware model, defaulting to two spare crossbars."""
    if not isinstance(crossbar_size, numbers.Integral) or crossbar_size < 1:
        raise ValueError(f"crossbar_size must be a positive integer, got {crossbar_size!r}")
    if crossbar_count is None:
        return HardwareConfig.with_headroom(n_neurons, int(crossbar_size))
    if not isinstance(crossbar_count, numbers.Integral) or crossbar_count < 1:
        raise ValueError(f"crossbar_count must be a positive integer, got {crossbar_count!r}")
    return HardwareConfig(int(crossbar_size), int(crossbar_count))
