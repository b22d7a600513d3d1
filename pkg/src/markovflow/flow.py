"""Ergodic flows on networks and their rescaling with the Markov time.

Visit rates never depend on the Markov time; only link flows do, and they
scale linearly with it. The dense transition matrices in this module are
oracles for small networks and are guarded by a node cap.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .network import FEATURE, Network, NetworkError, TransitionView, transition_view

logger = logging.getLogger(__name__)

DENSE_NODE_CAP = 2000


class ConvergenceError(RuntimeError):
    pass


class DenseCapError(ValueError):
    """Raised when a dense oracle is requested for too large a network."""


def plogp(x):
    """Elementwise ``x * log2(x)`` with ``0 log 0 = 0``."""
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = x[pos] * np.log2(x[pos])
    return out


@dataclass(frozen=True, eq=False)
class FlowModel:
    """Node visit rates and directed link flows at a given Markov time.

    ``node_plogp`` holds, per node, the sum of ``p log2 p`` over the visit
    rates the node stands for. It equals ``plogp(visit_rate)`` for ordinary
    nodes and differs only for aggregated (coarse) nodes, so that code lengths
    of coarse partitions match those of their fine preimages.
    """

    visit_rate: np.ndarray
    source: np.ndarray
    target: np.ndarray
    link_flow: np.ndarray
    markov_time: float = 1.0
    role_mask: np.ndarray | None = None
    node_plogp: np.ndarray | None = None

    def __post_init__(self):
        if self.node_plogp is None:
            object.__setattr__(self, "node_plogp", plogp(self.visit_rate))
        for arr in (self.visit_rate, self.source, self.target, self.link_flow,
                    self.node_plogp):
            arr.setflags(write=False)

    @property
    def node_count(self) -> int:
        return int(self.visit_rate.size)

    def rescaled(self, t: float) -> FlowModel:
        """Same visit rates, link flows multiplied by ``t / markov_time``."""
        _check_time(t)
        return FlowModel(self.visit_rate, self.source, self.target,
                         self.link_flow * (t / self.markov_time), float(t),
                         self.role_mask, self.node_plogp)


def _check_time(t):
    if not np.isfinite(t) or t <= 0:
        raise ValueError(f"Markov time must be positive, got {t}")


def power_iteration(tv: TransitionView, teleport: float = 0.15, tol: float = 1e-15,
                    max_iter: int = 10_000) -> np.ndarray:
    """Stationary distribution of the walk with uniform teleportation.

    Dangling mass is spread uniformly each step. Iterates until the L1 change
    drops below ``tol``.
    """
    if not 0 <= teleport < 1:
        raise ValueError("teleport must lie in [0, 1)")
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = tv.node_count
    mt = tv.matrix().T.tocsr()
    p = np.full(n, 1.0 / n)
    residual = np.inf
    for _ in range(max_iter):
        dangling_mass = p[tv.dangling].sum()
        nxt = (1.0 - teleport) * (mt @ p + dangling_mass / n) + teleport / n
        nxt /= nxt.sum()
        residual = np.abs(nxt - p).sum()
        p = nxt
        if residual < tol:
            return p
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} iterations (residual {residual:.3g})"
    )


def stationary_visit_rates(tv: TransitionView, teleport: float = 0.15, tol: float = 1e-15,
                           max_iter: int = 10_000, undirected: bool = False) -> np.ndarray:
    """Ergodic visit rates.

    Undirected networks use the closed form (strength-proportional); directed
    ones use :func:`power_iteration`.
    """
    if undirected:
        s = np.asarray(tv.out_strength, dtype=np.float64)
        return s / s.sum()
    return power_iteration(tv, teleport, tol, max_iter)


def default_teleport(net: Network) -> float:
    return 0.15 if net.directed else 0.0


def build_flow_model(net: Network, t: float = 1.0, teleport: float | None = None,
                     tv: TransitionView | None = None) -> FlowModel:
    """Flow model of the standard random walk on ``net`` at Markov time ``t``.

    Link flow of arc ``u -> v`` is ``t * p_u * P(u -> v)``; teleportation
    steps are not recorded as link flow.
    """
    _check_time(t)
    if teleport is None:
        teleport = default_teleport(net)
    tv = tv if tv is not None else transition_view(net)
    p = stationary_visit_rates(tv, teleport, undirected=not net.directed)
    src = np.repeat(np.arange(tv.node_count), np.diff(tv.indptr))
    flow = p[src] * tv.probs
    if t != 1.0:
        flow = flow * t
    return FlowModel(p, src, np.asarray(tv.indices, dtype=np.int64), flow, float(t),
                     net.node_role)


def bipartite_flow_model(net: Network, tv: TransitionView | None = None) -> FlowModel:
    """Two-step bipartite dynamics: only primary visits are encoded.

    Equivalent to Markov time 2 with primary visit rates doubled and feature
    visit rates set to zero.
    """
    if not net.is_bipartite:
        raise NetworkError("bipartite dynamics require a bipartite network")
    if net.directed:
        raise NetworkError("bipartite dynamics require an undirected network")
    base = build_flow_model(net, 1.0, teleport=0.0, tv=tv)
    p = np.where(net.node_role == FEATURE, 0.0, 2.0 * base.visit_rate)
    return FlowModel(p, base.source, base.target, 2.0 * base.link_flow, 2.0,
                     net.node_role)


def flow_model_from_dense(matrix, visit_rate) -> FlowModel:
    """Flow model of a network whose transition structure is ``matrix``.

    Used to evaluate reconstructed (oracle) networks at Markov time 1.
    """
    m = sp.coo_matrix(np.asarray(matrix, dtype=np.float64))
    p = np.asarray(visit_rate, dtype=np.float64)
    flow = p[m.row] * m.data
    return FlowModel(p, m.row.astype(np.int64), m.col.astype(np.int64), flow, 1.0)


@dataclass(frozen=True, eq=False)
class DenseTransition:
    matrix: np.ndarray
    markov_time: float
    kind: str

    def to_csv(self, path) -> None:
        np.savetxt(path, self.matrix, delimiter=",", fmt="%.17g")


def _dense_base(tv: TransitionView, cap: int) -> np.ndarray:
    n = tv.node_count
    if n > cap:
        raise DenseCapError(f"dense oracle limited to {cap} nodes, network has {n}")
    td = tv.matrix().toarray()
    td[tv.dangling] = 1.0 / n
    return td


def dense_linearized(tv: TransitionView, t: float, cap: int = DENSE_NODE_CAP) -> DenseTransition:
    """``(1-t) I + t T`` for ``t < 1`` and ``t T`` (rates) for ``t >= 1``."""
    _check_time(t)
    td = _dense_base(tv, cap)
    if t < 1:
        m = (1.0 - t) * np.eye(td.shape[0]) + t * td
    else:
        m = t * td
    return DenseTransition(m, float(t), "linearized")


def dense_continuous(tv: TransitionView, t: float, tail_tol: float = 1e-12,
                     cap: int = DENSE_NODE_CAP) -> DenseTransition:
    """``exp(-t (I - T))`` as the Poisson-weighted series of powers of ``T``.

    Summation stops once the remaining Poisson tail mass is below ``tail_tol``.
    """
    _check_time(t)
    if tail_tol <= 0:
        raise ValueError("tail_tol must be positive")
    td = _dense_base(tv, cap)
    n = td.shape[0]
    # log-space weights avoid underflow of exp(-t) for large t
    log_w = -t
    power = np.eye(n)
    acc = np.zeros((n, n))
    mass = 0.0
    i = 0
    mode = int(np.floor(t))
    while True:
        w = np.exp(log_w)
        acc += w * power
        mass += w
        if i >= mode and 1.0 - mass < tail_tol:
            break
        i += 1
        log_w += np.log(t) - np.log(i)
        power = power @ td
        if i > 10 * (t + 10) + 1000:
            logger.warning("Poisson series truncated at %d terms", i)
            break
    return DenseTransition(acc, float(t), "continuous")
