"""scikit-learn compatible front ends."""

from __future__ import annotations

import scipy.sparse as sp
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .flow import bipartite_flow_model, build_flow_model
from .mapeq import Partition, map_equation
from .projection import FastProjectionParams, fast_projection
from .search import SearchConfig, optimize
from .validation import check_count, check_markov_time, check_network


def flow_model_for(net, markov_time=1.0, bipartite=False, teleport=None):
    """Flow model used by the estimators and the CLI.

    With ``bipartite`` the two-step dynamics are used and ``markov_time``
    counts two-step rounds, so the effective time is ``2 * markov_time``.
    """
    t = check_markov_time(markov_time)
    if bipartite:
        fm = bipartite_flow_model(net)
        return fm if t == 1.0 else fm.rescaled(2.0 * t)
    return build_flow_model(net, t, teleport=teleport)


class MapEquationClustering(ClusterMixin, BaseEstimator):
    """Flow-based community detection with the map equation at a chosen
    Markov time.

    Parameters
    ----------
    markov_time : float, default=1.0
        Link flows are rescaled by this factor; visit rates are unchanged.
    bipartite : bool, default=False
        Encode only primary-node visits (two-step dynamics). Matrix input is
        then read as a primaries x features biadjacency.
    multilevel : bool, default=False
        Search for nested modules instead of a two-level partition.
    trials : int, default=10
    seed : int, default=123
    teleport : float or None
        Teleportation probability for directed input; None picks 0.15 for
        directed and 0 for undirected networks.
    directed : bool or None
        For matrix input; None infers it from symmetry.

    Attributes
    ----------
    labels_ : ndarray of shape (n_nodes,)
        Top-level module of every node.
    codelength_ : float
        Code length in bits of the returned solution.
    hierarchy_ : Hierarchy or None
    n_modules_ : int
    flow_model_ : FlowModel
    """

    def __init__(self, markov_time=1.0, bipartite=False, multilevel=False, trials=10,
                 seed=123, teleport=None, directed=None, tune_iterations=10):
        self.markov_time = markov_time
        self.bipartite = bipartite
        self.multilevel = multilevel
        self.trials = trials
        self.seed = seed
        self.teleport = teleport
        self.directed = directed
        self.tune_iterations = tune_iterations

    def fit(self, X, y=None):
        net = check_network(X, directed=self.directed, bipartite=self.bipartite)
        cfg = SearchConfig(trials=check_count(self.trials, "trials"), seed=int(self.seed),
                           tune_iterations=check_count(self.tune_iterations,
                                                       "tune_iterations"),
                           mode="multilevel" if self.multilevel else "two-level")
        fm = flow_model_for(net, self.markov_time, self.bipartite, self.teleport)
        res = optimize(fm, cfg)
        self.network_ = net
        self.flow_model_ = fm
        self.labels_ = res.partition.module_of.copy()
        self.codelength_ = res.codelength
        self.hierarchy_ = res.hierarchy
        self.n_modules_ = res.module_count
        self.result_ = res
        return self

    def codelength(self, labels) -> float:
        """Two-level code length of another labeling of the fitted network."""
        check_is_fitted(self, "flow_model_")
        return map_equation(self.flow_model_, Partition(labels))

    def score(self, X=None, y=None):
        """Negative code length (higher is better)."""
        check_is_fitted(self, "codelength_")
        return -self.codelength_


class FastProjection(TransformerMixin, BaseEstimator):
    """Sparse unipartite projection of a bipartite network.

    ``transform`` returns the directed primaries x primaries weight matrix
    (CSR) holding two-step probabilities of the sampled links.
    """

    def __init__(self, top_x=1000, top_y=10, seed=123):
        self.top_x = top_x
        self.top_y = top_y
        self.seed = seed

    def _params(self):
        return FastProjectionParams(check_count(self.top_x, "top_x"),
                                    check_count(self.top_y, "top_y"), int(self.seed))

    def fit(self, X, y=None):
        net = check_network(X, bipartite=True)
        self.params_ = self._params()
        self.n_primaries_ = int(net.primaries().size)
        return self

    def project(self, X):
        """Projected network as a :class:`Network`."""
        check_is_fitted(self, "params_")
        return fast_projection(check_network(X, bipartite=True), self.params_)

    def transform(self, X):
        net = self.project(X)
        return sp.csr_matrix((net.weight, (net.source, net.target)),
                             shape=(net.node_count, net.node_count))
