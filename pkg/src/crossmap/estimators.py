"""scikit-learn style partitioners.

Each estimator is fitted on a workload (a :class:`~crossmap.graph.SpikeGraph`
or a square spike-count matrix) and exposes the crossbar of every neuron in
``labels_``, mirroring the clustering estimators of scikit-learn.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_is_fitted

from .greedy import greedy_sweep, partition_from_state
from .hill_climb import climb
from .oracle import exhaustive_contiguous
from .partition import loads_from_labels, max_cost
from .pso import PsoConfig, pso_partition
from .validation import check_graph, check_hardware


class _CrossbarPartitioner(ClusterMixin, BaseEstimator):
    def _prepare(self, X):
        graph = check_graph(X)
        hw = check_hardware(self.crossbar_size, self.crossbar_count, graph.n_neurons)
        hw.check_feasible(graph.n_neurons)
        self.hardware_ = hw
        self.n_features_in_ = graph.n_neurons
        return graph, hw

    def _finish(self, graph, partition):
        self.partition_ = partition
        self.labels_ = partition.labels
        self.cost_ = max_cost(graph, partition)
        return self

    def score(self, X, y=None):
        """Negative inter-cluster spikes of the fitted mapping on ``X``."""
        check_is_fitted(self, "labels_")
        graph = check_graph(X)
        if graph.n_neurons != self.labels_.shape[0]:
            raise ValueError(
                f"X has {graph.n_neurons} neurons, the mapping was fitted on {self.labels_.shape[0]}"
            )
        loads = loads_from_labels(graph, self.labels_, self.partition_.n_clusters)
        return -float(loads.sum())


class GreedyPartitioner(_CrossbarPartitioner):
    """Single greedy sweep over the layer-major neuron order.

    Parameters
    ----------
    crossbar_size : int, default=256
        Neurons per crossbar.
    crossbar_count : int or None, default=None
        Number of crossbars; ``None`` uses the minimum that fits plus two.

    Attributes
    ----------
    labels_ : ndarray of shape (n_neurons,)
    partition_ : Partition
    cost_ : CostReport
    n_accumulations_ : int
        Synapse weights summed during the sweep.
    """

    def __init__(self, crossbar_size=256, crossbar_count=None):
        self.crossbar_size = crossbar_size
        self.crossbar_count = crossbar_count

    def fit(self, X, y=None):
        graph, hw = self._prepare(X)
        state = greedy_sweep(graph, hw)
        self.n_accumulations_ = state.accumulations
        return self._finish(graph, partition_from_state(graph, hw, state))


class HillClimbPartitioner(_CrossbarPartitioner):
    """Greedy sweep refined by steepest-descent boundary moves.

    Parameters
    ----------
    crossbar_size : int, default=256
    crossbar_count : int or None, default=None
    max_iter : int or None, default=None
        Cap on accepted moves; ``None`` means ``10 * n_neurons``.

    Attributes
    ----------
    initial_partition_ : Partition
        The greedy starting point.
    trace_ : ClimbTrace
    """

    def __init__(self, crossbar_size=256, crossbar_count=None, max_iter=None):
        self.crossbar_size = crossbar_size
        self.crossbar_count = crossbar_count
        self.max_iter = max_iter

    def fit(self, X, y=None):
        graph, hw = self._prepare(X)
        start = partition_from_state(graph, hw, greedy_sweep(graph, hw))
        self.initial_partition_ = start
        partition, self.trace_ = climb(graph, start, hw, max_iters=self.max_iter)
        return self._finish(graph, partition)


class PSOPartitioner(_CrossbarPartitioner):
    """Particle swarm search over free neuron-to-crossbar assignments.

    Attributes
    ----------
    fitness_trace_ : ndarray of shape (n_iter,)
        Global-best fitness after every iteration.
    """

    def __init__(
        self,
        crossbar_size=256,
        crossbar_count=None,
        swarm_size=50,
        n_iter=2000,
        inertia=0.7298,
        c1=1.49618,
        c2=1.49618,
        capacity_penalty=None,
        random_state=0,
    ):
        self.crossbar_size = crossbar_size
        self.crossbar_count = crossbar_count
        self.swarm_size = swarm_size
        self.n_iter = n_iter
        self.inertia = inertia
        self.c1 = c1
        self.c2 = c2
        self.capacity_penalty = capacity_penalty
        self.random_state = random_state

    def fit(self, X, y=None):
        graph, hw = self._prepare(X)
        cfg = PsoConfig(
            swarm_size=self.swarm_size,
            iterations=self.n_iter,
            inertia=self.inertia,
            cognitive=self.c1,
            social=self.c2,
            capacity_penalty=self.capacity_penalty,
            seed=self.random_state,
        )
        partition, self.fitness_trace_ = pso_partition(graph, hw, cfg)
        return self._finish(graph, partition)


class ExhaustivePartitioner(_CrossbarPartitioner):
    """Optimal contiguous partition by enumeration (tiny workloads only)."""

    def __init__(self, crossbar_size=256, crossbar_count=None):
        self.crossbar_size = crossbar_size
        self.crossbar_count = crossbar_count

    def fit(self, X, y=None):
        graph, hw = self._prepare(X)
        partition, _ = exhaustive_contiguous(graph, hw)
        return self._finish(graph, partition)
