"""Partition comparison by normalized mutual information."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .mapeq import Hierarchy, Partition


def _labels(x) -> np.ndarray:
    if isinstance(x, Partition):
        return x.module_of
    if isinstance(x, Hierarchy):
        return x.leaf_partition().module_of
    return np.asarray(x)


def _entropy(counts: np.ndarray, n: int) -> float:
    p = np.sort(counts[counts > 0]) / n
    return float(-(p * np.log(p)).sum())


def nmi(a, b) -> float:
    """Mutual information normalized by the arithmetic mean of the two
    partition entropies.

    Two all-in-one partitions score 1.
    """
    la, lb = _labels(a), _labels(b)
    if la.shape != lb.shape:
        raise ValueError(f"node sets differ: {la.size} vs {lb.size} nodes")
    n = la.size
    if n == 0:
        raise ValueError("empty partitions")
    _, ia = np.unique(la, return_inverse=True)
    _, ib = np.unique(lb, return_inverse=True)
    ia, ib = ia.ravel(), ib.ravel()
    table = sp.coo_matrix((np.ones(n), (ia, ib))).tocsr()
    table.sum_duplicates()
    ha = _entropy(np.bincount(ia), n)
    hb = _entropy(np.bincount(ib), n)
    if ha == 0 and hb == 0:
        return 1.0
    nij = table.data
    rows = np.repeat(np.arange(table.shape[0]), np.diff(table.indptr))
    ca, cb = np.bincount(ia), np.bincount(ib)
    terms = nij / n * np.log(nij * n / (ca[rows] * cb[table.indices]))
    # summing in sorted order makes the result exactly symmetric and
    # invariant under relabeling
    mi = float(np.sort(terms).sum())
    val = mi / ((ha + hb) / 2.0)
    return float(min(max(val, 0.0), 1.0))


def leaf_nmi(a: Hierarchy, b: Hierarchy) -> float:
    """NMI of the finest-level module assignments."""
    return nmi(a.leaf_partition(), b.leaf_partition())
