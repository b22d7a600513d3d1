"""Sparse weighted networks, row-stochastic transition views and the exact
bipartite projection."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

PRIMARY = 0
FEATURE = 1


class NetworkError(ValueError):
    """Raised when a network violates its structural contract."""


@dataclass(frozen=True, eq=False)
class Network:
    """Weighted graph with contiguous 0-based node ids.

    Links are canonicalized on construction: sorted by ``(source, target)``,
    duplicates summed, and for undirected networks stored once with
    ``source <= target``.

    Parameters
    ----------
    node_count : int
    source, target : array of int
    weight : array of float
        Strictly positive.
    directed : bool
    node_names : list of str, optional
    node_ids : list, optional
        Original input identifiers, kept for output.
    node_role : array of int8, optional
        ``PRIMARY`` or ``FEATURE`` per node; present iff bipartite.
    """

    node_count: int
    source: np.ndarray
    target: np.ndarray
    weight: np.ndarray
    directed: bool = False
    node_names: list | None = None
    node_ids: list | None = None
    node_role: np.ndarray | None = None
    _strength: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        n = int(self.node_count)
        src = np.asarray(self.source, dtype=np.int64).ravel()
        dst = np.asarray(self.target, dtype=np.int64).ravel()
        w = np.asarray(self.weight, dtype=np.float64).ravel()
        if not (src.shape == dst.shape == w.shape):
            raise NetworkError("source, target and weight must have equal length")
        if n < 0:
            raise NetworkError("node_count must be nonnegative")
        if src.size and (src.min() < 0 or dst.min() < 0 or max(src.max(), dst.max()) >= n):
            raise NetworkError(f"node ids must lie in [0, {n})")
        if np.any(~(w > 0)) or not np.all(np.isfinite(w)):
            raise NetworkError("link weights must be strictly positive and finite")
        if not self.directed:
            lo, hi = np.minimum(src, dst), np.maximum(src, dst)
            src, dst = lo, hi
        if src.size:
            key = src * n + dst
            uniq, inv = np.unique(key, return_inverse=True)
            w = np.bincount(inv, weights=w, minlength=uniq.size)
            src, dst = uniq // n, uniq % n
        role = None
        if self.node_role is not None:
            role = np.asarray(self.node_role, dtype=np.int8).ravel()
            if role.shape != (n,):
                raise NetworkError("node_role must have one entry per node")
            if np.any((role != PRIMARY) & (role != FEATURE)):
                raise NetworkError("node_role entries must be PRIMARY or FEATURE")
            if src.size and np.any(role[src] == role[dst]):
                bad = int(np.flatnonzero(role[src] == role[dst])[0])
                raise NetworkError(
                    f"same-role link {int(src[bad])}-{int(dst[bad])} in bipartite network"
                )
            role.setflags(write=False)
        for name in ("node_names", "node_ids"):
            val = getattr(self, name)
            if val is not None and len(val) != n:
                raise NetworkError(f"{name} must have one entry per node")
        for arr in (src, dst, w):
            arr.setflags(write=False)
        object.__setattr__(self, "node_count", n)
        object.__setattr__(self, "source", src)
        object.__setattr__(self, "target", dst)
        object.__setattr__(self, "weight", w)
        object.__setattr__(self, "node_role", role)

    @property
    def link_count(self) -> int:
        return int(self.source.size)

    @property
    def is_bipartite(self) -> bool:
        return self.node_role is not None

    def arcs(self):
        """Directed arcs ``(source, target, weight)``; undirected links yield
        both directions, self-links once."""
        if self.directed:
            return self.source, self.target, self.weight
        loop = self.source == self.target
        rev = ~loop
        return (
            np.concatenate([self.source, self.target[rev]]),
            np.concatenate([self.target, self.source[rev]]),
            np.concatenate([self.weight, self.weight[rev]]),
        )

    def out_strength(self) -> np.ndarray:
        if self._strength is None:
            s, _, w = self.arcs()
            strength = np.bincount(s, weights=w, minlength=self.node_count)
            strength.setflags(write=False)
            object.__setattr__(self, "_strength", strength)
        return self._strength

    def adjacency(self) -> sp.csr_matrix:
        """Arc-weight matrix, ``A[u, v]`` = weight of arc u -> v."""
        s, d, w = self.arcs()
        return sp.csr_matrix((w, (s, d)), shape=(self.node_count, self.node_count))

    def primaries(self) -> np.ndarray:
        self._require_bipartite()
        return np.flatnonzero(self.node_role == PRIMARY)

    def features(self) -> np.ndarray:
        self._require_bipartite()
        return np.flatnonzero(self.node_role == FEATURE)

    def _require_bipartite(self):
        if self.node_role is None:
            raise NetworkError("operation requires a bipartite network")

    def label(self, node: int):
        """Original identifier of ``node`` (falls back to the internal id)."""
        return self.node_ids[node] if self.node_ids is not None else node

    def name(self, node: int) -> str:
        if self.node_names is not None:
            return str(self.node_names[node])
        return str(self.label(node))

    def same_links(self, other: Network) -> bool:
        return (
            self.node_count == other.node_count
            and self.directed == other.directed
            and np.array_equal(self.source, other.source)
            and np.array_equal(self.target, other.target)
            and np.array_equal(self.weight, other.weight)
            and (
                (self.node_role is None and other.node_role is None)
                or (
                    self.node_role is not None
                    and other.node_role is not None
                    and np.array_equal(self.node_role, other.node_role)
                )
            )
        )

    def symmetrized(self) -> Network:
        """Undirected copy; reciprocal arcs are merged by summing weights."""
        if not self.directed:
            return self
        return Network(self.node_count, self.source, self.target, self.weight, directed=False,
                       node_names=self.node_names, node_ids=self.node_ids,
                       node_role=self.node_role)

    @classmethod
    def from_matrix(cls, matrix, directed: bool | None = None, **kwargs) -> Network:
        """Build from a square (sparse or dense) weight matrix.

        Symmetric matrices become undirected networks unless ``directed`` is
        given. An undirected reading of an asymmetric matrix uses
        ``(M + M.T) / 2``.
        """
        m = sp.csr_matrix(matrix, dtype=np.float64)
        if m.shape[0] != m.shape[1]:
            raise NetworkError("adjacency matrix must be square")
        m.eliminate_zeros()
        if directed is None:
            directed = (abs(m - m.T) > 1e-12 * max(1.0, abs(m).max())).nnz > 0
        if not directed:
            m = sp.triu((m + m.T) * 0.5).tocoo()
        else:
            m = m.tocoo()
        return cls(m.shape[0], m.row, m.col, m.data, directed=directed, **kwargs)

    @classmethod
    def from_biadjacency(cls, matrix, **kwargs) -> Network:
        """Build an undirected bipartite network from a primaries x features
        weight matrix; features are numbered after primaries."""
        m = sp.coo_matrix(matrix, dtype=np.float64)
        m.eliminate_zeros()
        n_p, n_f = m.shape
        role = np.concatenate([np.full(n_p, PRIMARY), np.full(n_f, FEATURE)])
        return cls(n_p + n_f, m.row, m.col + n_p, m.data, directed=False,
                   node_role=role, **kwargs)


@dataclass(frozen=True, eq=False)
class TransitionView:
    """Row-normalized out-neighbor lists in CSR layout."""

    out_strength: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    probs: np.ndarray
    dangling: np.ndarray

    @property
    def node_count(self) -> int:
        return int(self.out_strength.size)

    def row(self, u: int):
        lo, hi = self.indptr[u], self.indptr[u + 1]
        return list(zip(self.indices[lo:hi].tolist(), self.probs[lo:hi].tolist()))

    def matrix(self) -> sp.csr_matrix:
        n = self.node_count
        return sp.csr_matrix((self.probs, self.indices, self.indptr), shape=(n, n))


def transition_view(net: Network) -> TransitionView:
    if net.node_count == 0:
        raise NetworkError("network is empty")
    a = net.adjacency()
    a.sort_indices()
    strength = np.asarray(a.sum(axis=1)).ravel()
    dangling = strength <= 0
    counts = np.diff(a.indptr)
    scale = np.repeat(np.where(dangling, 1.0, strength), counts)
    probs = a.data / scale
    for arr in (strength, a.indptr, a.indices, probs, dangling):
        arr.setflags(write=False)
    return TransitionView(strength, a.indptr, a.indices, probs, dangling)


def project_bipartite_full(net: Network) -> Network:
    """Exact unipartite projection onto primary nodes.

    The weight between primaries ``a`` and ``b`` is the two-step flow
    ``sum_f w_af * w_fb / s_f`` through shared features. Self-projections are
    kept as self-links, so primary strengths are preserved.
    """
    net._require_bipartite()
    if net.directed:
        raise NetworkError("bipartite projection requires an undirected network")
    prim = net.primaries()
    feat = net.features()
    a = net.adjacency().tocsr()
    b = a[prim][:, feat]
    s_f = np.asarray(b.sum(axis=0)).ravel()
    inv = np.divide(1.0, s_f, out=np.zeros_like(s_f), where=s_f > 0)
    proj = (b @ sp.diags(inv) @ b.T).tocsr()
    upper = sp.triu(proj).tocoo()
    names = None if net.node_names is None else [net.node_names[i] for i in prim]
    ids = None if net.node_ids is None else [net.node_ids[i] for i in prim]
    return Network(prim.size, upper.row, upper.col, upper.data, directed=False,
                   node_names=names, node_ids=ids)
