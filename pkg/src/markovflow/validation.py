"""Input validation helpers shared by the estimators and the CLI."""

from __future__ import annotations

import numbers

import numpy as np
import scipy.sparse as sp
from sklearn.utils.validation import check_array

from .network import Network, NetworkError


def check_network(X, directed=None, bipartite: bool = False) -> Network:
    """Coerce ``X`` into a :class:`Network`.

    Accepts a Network, or a dense/sparse matrix. With ``bipartite=True`` a
    matrix is read as a primaries x features biadjacency; otherwise it must be
    square and is read as an adjacency matrix.
    """
    if isinstance(X, Network):
        if bipartite and not X.is_bipartite:
            raise NetworkError("expected a bipartite network")
        return X
    m = check_array(X, accept_sparse=("csr", "csc", "coo"), dtype=np.float64,
                    ensure_min_samples=1, ensure_min_features=1)
    if (m < 0).sum() if sp.issparse(m) else np.any(m < 0):
        raise NetworkError("weights must be nonnegative")
    if bipartite:
        return Network.from_biadjacency(m)
    return Network.from_matrix(m, directed=directed)


def check_markov_time(t) -> float:
    if not isinstance(t, numbers.Real) or not np.isfinite(t) or t <= 0:
        raise ValueError(f"markov_time must be a positive real, got {t!r}")
    return float(t)


def check_count(value, name: str, minimum: int = 1) -> int:
    if not isinstance(value, numbers.Integral) or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)
