"""scikit-learn style estimator facade.

The detectors are fit-shaped clusterers over a :class:`HeteroNetwork`: all
hyperparameters live in ``__init__`` (so ``get_params``/``set_params``/
``clone`` work), ``fit`` runs the algorithm and stores fitted attributes with
the usual trailing underscore, and ``fit_predict`` returns the partition.
"""
from __future__ import annotations

from sklearn.base import BaseEstimator

from .baselines import baseline_detect, naive_simp, project_common_neighbors, project_jaccard
from .model import HeteroNetwork, Partition
from .modularity import WeightingScheme, composite_modularity
from .optimize import OptimizerConfig, louvain, louvain_c


def check_network(X) -> HeteroNetwork:
    """Validate estimator input: must be a HeteroNetwork with at least one node."""
    if not isinstance(X, HeteroNetwork):
        raise TypeError(
            f"expected a HeteroNetwork, got {type(X).__name__}; parse one with "
            "hmrnet.parse_hmrn or build one with hmrnet.NetworkBuilder"
        )
    if X.n == 0:
        raise ValueError("network has no nodes")
    return X


class _BaseDetector(BaseEstimator):
    def _config(self, n_edge_types: int) -> OptimizerConfig:
        weights = getattr(self, "weights", None)
        scheme = (
            WeightingScheme.edge_fraction()
            if weights is None
            else WeightingScheme.custom(weights)
        )
        return OptimizerConfig(
            rng_seed=self.seed,
            gain_epsilon=self.gain_epsilon,
            max_outer_iterations=self.max_outer_iterations,
            scheme=scheme,
        )

    def fit_predict(self, X, y=None) -> Partition:
        self.fit(X)
        return self.partition_

    def _store(self, network: HeteroNetwork, partition: Partition, report) -> None:
        self.partition_ = partition
        self.report_ = report
        self.q_ = report.score
        self.labels_ = {
            table.name: partition.labels[table.type_id].copy()
            for table in network.node_tables
        }
        self.n_communities_ = {
            table.name: partition.community_count(table.type_id)
            for table in network.node_tables
        }


class CompositeLouvain(_BaseDetector):
    """Adapted Louvain over the composite objective.

    Parameters
    ----------
    seed : int
        Sweep-order RNG seed; fixes the result bit for bit.
    gain_epsilon : float
        A move is accepted only if its gain exceeds this.
    max_outer_iterations : int
        Cap on phase-1/phase-2 rounds.
    weights : sequence of float or None
        None selects edge-fraction weighting; otherwise one positive weight
        per edge type, entering the objective as 1/w.
    """

    def __init__(self, seed=0, gain_epsilon=1e-10, max_outer_iterations=100, weights=None):
        self.seed = seed
        self.gain_epsilon = gain_epsilon
        self.max_outer_iterations = max_outer_iterations
        self.weights = weights

    def fit(self, X, y=None):
        network = check_network(X)
        result = louvain(network, self._config(network.s))
        self._store(network, result.partition, result.report)
        self.q_trace_ = list(result.q_trace)
        self.n_moves_ = result.moves
        return self


class ConstrainedCompositeLouvain(_BaseDetector):
    """Divide-and-rule variant: per-subnetwork detection, trace constraints,
    then composite optimization on the contracted network."""

    def __init__(self, seed=0, gain_epsilon=1e-10, max_outer_iterations=100, weights=None):
        self.seed = seed
        self.gain_epsilon = gain_epsilon
        self.max_outer_iterations = max_outer_iterations
        self.weights = weights

    def fit(self, X, y=None):
        network = check_network(X)
        result = louvain_c(network, self._config(network.s))
        self._store(network, result.partition, result.report)
        self.timings_ = dict(result.timings)
        self.n_groups_ = result.groups
        return self


class ProjectionLouvain(_BaseDetector):
    """Similarity-projection baseline: per node type, flatten to a weighted
    unipartite network (common-neighbor counts or Jaccard index) and run
    plain Louvain on it."""

    def __init__(self, metric="common-neighbors", seed=0, gain_epsilon=1e-10,
                 max_outer_iterations=100):
        self.metric = metric
        self.seed = seed
        self.gain_epsilon = gain_epsilon
        self.max_outer_iterations = max_outer_iterations

    def fit(self, X, y=None):
        network = check_network(X)
        if self.metric == "common-neighbors":
            project = project_common_neighbors
        elif self.metric == "jaccard":
            project = project_jaccard
        else:
            raise ValueError(
                f"metric must be 'common-neighbors' or 'jaccard', got {self.metric!r}"
            )
        config = self._config(network.s)
        labels = []
        offset = 0
        self.projections_ = []
        for table in network.node_tables:
            projection = project(network, table.type_id)
            self.projections_.append(projection)
            part = baseline_detect(projection, config)
            arr = part.labels[0] + offset
            if arr.size:
                offset = int(arr.max()) + 1
            labels.append(arr)
        partition = Partition(labels)
        report = composite_modularity(network, partition)
        self._store(network, partition, report)
        return self


class NaiveSimplification(_BaseDetector):
    """Per-edge-type detection; fitted attribute ``subnetwork_partitions_``
    holds one node->community mapping per edge type (nodes incident to it)."""

    def __init__(self, seed=0, gain_epsilon=1e-10, max_outer_iterations=100):
        self.seed = seed
        self.gain_epsilon = gain_epsilon
        self.max_outer_iterations = max_outer_iterations

    def fit(self, X, y=None):
        network = check_network(X)
        self.subnetwork_partitions_ = naive_simp(network, self._config(network.s))
        return self

    def fit_predict(self, X, y=None):
        self.fit(X)
        return self.subnetwork_partitions_
